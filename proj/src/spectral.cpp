#include "ergograph/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <random>

namespace ergograph {

namespace {

void check_sizes(const Distribution& pi, const TruncatedChain& chain, std::size_t fsize) {
  if (!(pi.box == chain.box())) throw Error("distribution and chain use different boxes");
  if (fsize != chain.box().size()) throw Error("test function has wrong length");
}

std::vector<double> chain_pi(const Distribution& pi, const TruncatedChain& chain) {
  std::vector<double> p(chain.size());
  for (std::size_t s = 0; s < chain.size(); ++s) {
    p[s] = pi.p[chain.box_index(s)];
    if (!(p[s] > 0.0)) throw Error("stationary distribution must be positive on the chain");
  }
  return p;
}

}  // namespace

std::string to_string(GapMethod m) { return m == GapMethod::dense ? "dense" : "iterative"; }

DirichletForms dirichlet_forms(const Distribution& pi, const TruncatedChain& chain, std::span<const double> f) {
  check_sizes(pi, chain, f.size());
  DirichletForms out;
  for (std::size_t s = 0; s < chain.size(); ++s) {
    const std::size_t bx = chain.box_index(s);
    const double ps = pi.p[bx], fx = f[bx];
    for (const auto& t : chain.row(s)) {
      const double fz = f[chain.box_index(t.target)];
      const double w = ps * t.rate;
      out.standard -= fx * (fz - fx) * w;
      out.symmetric += 0.5 * (fx - fz) * (fx - fz) * w;
    }
  }
  return out;
}

double expectation(const Distribution& pi, std::span<const double> f) {
  if (f.size() != pi.p.size()) throw Error("test function has wrong length");
  double m = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) m += pi.p[k] * f[k];
  return m;
}

double variance(const Distribution& pi, std::span<const double> f) {
  const double m = expectation(pi, f);
  double v = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) v += pi.p[k] * (f[k] - m) * (f[k] - m);
  return v;
}

double rayleigh_quotient(const Distribution& pi, const TruncatedChain& chain, std::span<const double> f) {
  const double var = variance(pi, f);
  if (!(var > 0.0)) throw Error("test function is constant under pi");
  return dirichlet_forms(pi, chain, f).symmetric / var;
}

namespace {

// Off-diagonal entry of M for the transition a -> b: rate pi_a / (2 sqrt(pi_a pi_b)),
// written as a ratio so that tiny tail masses do not underflow in the product.
double edge_weight(double pa, double pb, double rate) { return 0.5 * rate * std::sqrt(pa / pb); }

}  // namespace

Eigen::MatrixXd symmetrized_operator(const Distribution& pi, const TruncatedChain& chain) {
  auto p = chain_pi(pi, chain);
  const auto n = static_cast<Eigen::Index>(chain.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t s = 0; s < chain.size(); ++s) {
    const auto i = static_cast<Eigen::Index>(s);
    M(i, i) += chain.exit_rate(s);
    for (const auto& t : chain.row(s)) {
      const auto j = static_cast<Eigen::Index>(t.target);
      const double m = edge_weight(p[s], p[t.target], t.rate);
      M(i, j) -= m;
      M(j, i) -= m;
    }
  }
  return M;
}

void apply_symmetrized(const Distribution& pi, const TruncatedChain& chain, const Eigen::VectorXd& in,
                       Eigen::VectorXd& out) {
  const std::size_t n = chain.size();
  out.setZero(static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < n; ++s) {
    const auto i = static_cast<Eigen::Index>(s);
    const double ps = pi.p[chain.box_index(s)];
    out[i] += chain.exit_rate(s) * in[i];
    for (const auto& t : chain.row(s)) {
      const auto j = static_cast<Eigen::Index>(t.target);
      const double m = edge_weight(ps, pi.p[chain.box_index(t.target)], t.rate);
      out[i] -= m * in[j];
      out[j] -= m * in[i];
    }
  }
}

namespace {

GapEstimate dense_gap(const Distribution& pi, const TruncatedChain& chain) {
  Eigen::MatrixXd M = symmetrized_operator(pi, chain);
  const auto n = M.rows();
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = std::sqrt(pi.p[chain.box_index(static_cast<std::size_t>(i))]);
  v.normalize();
  // P M P + sigma v v^T with P = I - v v^T, as a rank-two update of M
  Eigen::VectorXd w = M * v;
  const double vw = v.dot(w);
  const double sigma = M.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  M.noalias() -= v * w.transpose();
  M.noalias() -= w * v.transpose();
  M.noalias() += (vw + sigma) * (v * v.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolve failed", 0.0, 0.0);
  const double lam = es.eigenvalues()[0];
  Eigen::VectorXd u = es.eigenvectors().col(0);
  GapEstimate g;
  g.value = std::max(lam, 0.0);
  g.method = GapMethod::dense;
  g.residual = (M * u - lam * u).norm();
  g.box = chain.box();
  return g;
}

// Lanczos on the inverse of M restricted to the complement of sqrt(pi). The inverse is
// applied by grounding the state of largest mass: M without that row and column is
// positive definite when the chain is irreducible, and since sqrt(pi)^T M = 0 the
// dropped equation holds automatically for right-hand sides orthogonal to sqrt(pi).
GapEstimate lanczos_gap(const Distribution& pi, const TruncatedChain& chain, const GapOptions& opt) {
  const std::size_t n = chain.size();
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::VectorXd root(N);
  for (std::size_t s = 0; s < n; ++s) root[static_cast<Eigen::Index>(s)] = std::sqrt(pi.p[chain.box_index(s)]);
  root.normalize();
  Eigen::Index ground = 0;
  root.maxCoeff(&ground);
  auto reduced = [&](std::size_t s) { return static_cast<Eigen::Index>(s) - (static_cast<Eigen::Index>(s) > ground ? 1 : 0); };

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n + 2 * chain.nonzeros());
  auto add = [&](std::size_t i, std::size_t j, double v) {
    if (static_cast<Eigen::Index>(i) == ground || static_cast<Eigen::Index>(j) == ground) return;
    trip.emplace_back(reduced(i), reduced(j), v);
  };
  std::vector<double> row_sum(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const double ps = pi.p[chain.box_index(s)];
    add(s, s, chain.exit_rate(s));
    row_sum[s] += chain.exit_rate(s);
    for (const auto& t : chain.row(s)) {
      const double pt = pi.p[chain.box_index(t.target)];
      const double c = edge_weight(ps, pt, t.rate);
      add(s, t.target, -c);
      add(t.target, s, -c);
      row_sum[s] += c;
      row_sum[t.target] += c;
    }
  }
  const double scale = std::max(1.0, *std::max_element(row_sum.begin(), row_sum.end()));
  Eigen::SparseMatrix<double> Mg(N - 1, N - 1);
  Mg.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Mg);
  if (ldlt.info() != Eigen::Success) throw ConvergenceError("factorization of the grounded operator failed", 0.0, 0.0);

  Eigen::VectorXd rhs(N - 1), sol(N - 1);
  auto apply_inverse = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    for (Eigen::Index i = 0, k = 0; i < N; ++i)
      if (i != ground) rhs[k++] = x[i];
    sol = ldlt.solve(rhs);
    y.resize(N);
    for (Eigen::Index i = 0, k = 0; i < N; ++i) y[i] = (i == ground) ? 0.0 : sol[k++];
    y -= root.dot(y) * root;
  };

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd q(N);
  for (Eigen::Index i = 0; i < N; ++i) q[i] = gauss(rng);
  q -= root.dot(q) * root;
  q.normalize();

  std::vector<Eigen::VectorXd> basis{q};
  std::vector<double> alpha, beta;
  Eigen::VectorXd w, u, mu;
  double best = 0.0, best_res = INFINITY;
  const std::size_t limit = std::min<std::size_t>(opt.max_iterations, n - 1);
  for (std::size_t j = 0; j < limit; ++j) {
    apply_inverse(basis[j], w);
    alpha.push_back(basis[j].dot(w));
    for (int pass = 0; pass < 2; ++pass) {
      w -= root.dot(w) * root;
      for (const auto& b : basis) w -= b.dot(w) * b;
    }
    const double bnext = w.norm();

    if ((j % 5 == 4) || bnext < 1e-12 || j + 1 == limit) {
      const auto k = static_cast<Eigen::Index>(alpha.size());
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
      Eigen::VectorXd sub = k > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), k - 1))
                                  : Eigen::VectorXd();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const double theta = es.eigenvalues()[k - 1];
      if (theta > 0.0) {
        u.setZero(N);
        for (Eigen::Index i = 0; i < k; ++i) u += es.eigenvectors()(i, k - 1) * basis[static_cast<std::size_t>(i)];
        u.normalize();
        best = 1.0 / theta;
        apply_symmetrized(pi, chain, u, mu);
        best_res = (mu - best * u).norm();
        if (best_res <= opt.tolerance * scale && (alpha.size() >= 20 || bnext < 1e-12)) {
          GapEstimate g;
          g.value = best;
          g.method = GapMethod::iterative;
          g.residual = best_res;
          g.box = chain.box();
          return g;
        }
      }
      if (bnext < 1e-12) break;
    }
    beta.push_back(bnext);
    basis.push_back(w / bnext);
  }
  throw ConvergenceError("Lanczos iteration did not converge", best - best_res, best + best_res);
}

}  // namespace

GapEstimate estimate_gap(const Distribution& pi, const TruncatedChain& chain, GapOptions options) {
  if (!(pi.box == chain.box())) throw Error("distribution and chain use different boxes");
  if (chain.size() < 2) throw Error("gap needs at least two states");
  chain_pi(pi, chain);
  if (chain.size() <= options.dense_limit) return dense_gap(pi, chain);
  return lanczos_gap(pi, chain, options);
}

std::vector<double> indicator_witness(const Distribution& pi, std::span<const std::size_t> set) {
  std::vector<double> ind(pi.p.size(), 0.0);
  for (std::size_t b : set) {
    if (b >= ind.size()) throw Error("witness set leaves the box");
    ind[b] = 1.0;
  }
  const double p = expectation(pi, ind);
  if (!(p > 0.0) || !(p < 1.0)) throw Error("witness set must have mass strictly between 0 and 1");
  const double c = 1.0 / std::sqrt(p - p * p);
  for (double& v : ind) v = c * v - c * p;
  return ind;
}

double witness_upper_bound(const Distribution& pi, const TruncatedChain& chain, std::span<const std::size_t> set) {
  auto f = indicator_witness(pi, set);
  return dirichlet_forms(pi, chain, f).symmetric;
}

}  // namespace ergograph
