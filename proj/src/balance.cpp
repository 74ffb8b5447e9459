#include <Eigen/Dense>
#include <cmath>

#include "ergograph/network.hpp"

namespace ergograph {

namespace {

struct ComplexFlows {
  std::vector<Complex> complexes;
  std::vector<std::vector<int>> out_reactions;  // reactions with this complex as source
  std::vector<std::vector<int>> in_reactions;   // reactions with this complex as product
};

ComplexFlows index_flows(const ReactionNetwork& net) {
  ComplexFlows f;
  f.complexes = net.complexes();
  f.out_reactions.resize(f.complexes.size());
  f.in_reactions.resize(f.complexes.size());
  auto find = [&](const Complex& y) {
    for (std::size_t k = 0; k < f.complexes.size(); ++k)
      if (f.complexes[k] == y) return static_cast<int>(k);
    return -1;
  };
  for (std::size_t r = 0; r < net.reactions.size(); ++r) {
    f.out_reactions[find(net.reactions[r].source)].push_back(static_cast<int>(r));
    f.in_reactions[find(net.reactions[r].product)].push_back(static_cast<int>(r));
  }
  return f;
}

double log_monomial(const Eigen::VectorXd& u, const Complex& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.coeffs.size(); ++i) s += y.coeffs[i] * u[static_cast<Eigen::Index>(i)];
  return s;
}

// Log-ratio residuals log(in_y) - log(out_y) and their Jacobian in log c.
void log_residuals(const ReactionNetwork& net, const ComplexFlows& f, const Eigen::VectorXd& u,
                   Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
  const auto m = static_cast<Eigen::Index>(f.complexes.size());
  const auto d = u.size();
  r.resize(m);
  if (jac) jac->setZero(m, d);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& y = f.complexes[k];
    double kout = 0.0;
    for (int ri : f.out_reactions[k]) kout += net.reactions[ri].kappa;
    double log_out = std::log(kout) + log_monomial(u, y);

    // log-sum-exp over incoming reactions
    double mx = -INFINITY;
    std::vector<double> terms;
    for (int ri : f.in_reactions[k]) {
      const auto& rx = net.reactions[ri];
      terms.push_back(std::log(rx.kappa) + log_monomial(u, rx.source));
      mx = std::max(mx, terms.back());
    }
    double s = 0.0;
    for (double t : terms) s += std::exp(t - mx);
    double log_in = mx + std::log(s);
    r[k] = log_in - log_out;
    if (jac) {
      for (std::size_t j = 0; j < terms.size(); ++j) {
        double w = std::exp(terms[j] - log_in);
        const auto& src = net.reactions[f.in_reactions[k][j]].source;
        for (Eigen::Index i = 0; i < d; ++i) (*jac)(k, i) += w * src.coeffs[i];
      }
      for (Eigen::Index i = 0; i < d; ++i) (*jac)(k, i) -= y.coeffs[i];
    }
  }
}

bool structurally_balanceable(const ComplexFlows& f) {
  for (std::size_t k = 0; k < f.complexes.size(); ++k)
    if (f.in_reactions[k].empty() || f.out_reactions[k].empty()) return false;
  return true;
}

Eigen::VectorXd lm_step(const Eigen::MatrixXd& J, const Eigen::VectorXd& r, double mu) {
  Eigen::MatrixXd H = J.transpose() * J;
  Eigen::VectorXd g = J.transpose() * r;
  Eigen::MatrixXd A = H;
  for (Eigen::Index i = 0; i < A.rows(); ++i) A(i, i) += mu * (H(i, i) + 1.0);
  Eigen::VectorXd step = A.ldlt().solve(-g);
  double n = step.norm();
  if (n > 4.0) step *= 4.0 / n;
  return step;
}

}  // namespace

BalanceReport verify_complex_balanced(const ReactionNetwork& net, std::span<const double> c, double rel_tol) {
  if (c.size() != net.dim()) throw Error("concentration vector has wrong dimension");
  for (double v : c)
    if (!(v > 0.0) || !std::isfinite(v)) throw Error("concentrations must be positive");
  BalanceReport rep;
  rep.complexes = net.complexes();
  const std::size_t m = rep.complexes.size();
  rep.inflow.assign(m, 0.0);
  rep.outflow.assign(m, 0.0);
  for (const auto& rx : net.reactions) {
    double flux = rx.kappa * monomial(c, rx.source);
    for (std::size_t k = 0; k < m; ++k) {
      if (rep.complexes[k] == rx.source) rep.outflow[k] += flux;
      if (rep.complexes[k] == rx.product) rep.inflow[k] += flux;
    }
  }
  rep.residuals.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    rep.residuals[k] = rep.outflow[k] - rep.inflow[k];
    rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(rep.residuals[k]));
    rep.max_flux = std::max({rep.max_flux, rep.inflow[k], rep.outflow[k]});
  }
  rep.relative_residual = rep.max_flux > 0.0 ? rep.max_abs_residual / rep.max_flux : 0.0;
  rep.balanced = rep.relative_residual <= rel_tol;
  return rep;
}

std::vector<double> balance_search_step(const ReactionNetwork& net, std::span<const double> c) {
  auto f = index_flows(net);
  if (!structurally_balanceable(f)) return {c.begin(), c.end()};
  Eigen::VectorXd u(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) u[static_cast<Eigen::Index>(i)] = std::log(c[i]);
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  log_residuals(net, f, u, r, &J);
  Eigen::VectorXd next = u + lm_step(J, r, 1e-8);
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = std::exp(next[static_cast<Eigen::Index>(i)]);
  return out;
}

std::optional<std::vector<double>> search_complex_balanced(const ReactionNetwork& net,
                                                           std::span<const double> initial,
                                                           BalanceSearchOptions options) {
  const std::size_t d = net.dim();
  std::vector<double> c0(d, 1.0);
  if (!initial.empty()) {
    if (initial.size() != d) throw Error("initial concentration vector has wrong dimension");
    c0.assign(initial.begin(), initial.end());
  }
  auto f = index_flows(net);
  if (!structurally_balanceable(f)) return std::nullopt;

  auto to_c = [&](const Eigen::VectorXd& u) {
    std::vector<double> c(d);
    for (std::size_t i = 0; i < d; ++i) c[i] = std::exp(u[static_cast<Eigen::Index>(i)]);
    return c;
  };
  Eigen::VectorXd u(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    if (!(c0[i] > 0.0)) throw Error("initial concentrations must be positive");
    u[static_cast<Eigen::Index>(i)] = std::log(c0[i]);
  }

  Eigen::VectorXd r, r_try;
  Eigen::MatrixXd J;
  log_residuals(net, f, u, r, &J);
  double mu = 1e-3;
  for (int it = 0; it < options.max_iterations; ++it) {
    auto c = to_c(u);
    if (verify_complex_balanced(net, c).relative_residual <= options.tolerance) return c;
    Eigen::VectorXd cand = u + lm_step(J, r, mu);
    log_residuals(net, f, cand, r_try, nullptr);
    if (r_try.allFinite() && r_try.squaredNorm() < r.squaredNorm()) {
      u = cand;
      log_residuals(net, f, u, r, &J);
      mu = std::max(mu / 3.0, 1e-12);
    } else {
      mu *= 4.0;
      if (mu > 1e12) break;
    }
  }
  auto c = to_c(u);
  if (verify_complex_balanced(net, c).relative_residual <= options.tolerance) return c;
  return std::nullopt;
}

}  // namespace ergograph
