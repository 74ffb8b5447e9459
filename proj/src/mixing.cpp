#include "ergograph/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace ergograph {

namespace {

// Largest uniformized time slice handled in one Poisson series.
constexpr double kSliceMean = 40.0;

// Poisson(mu) weights up to the point where the remaining tail is below tol.
std::vector<double> poisson_weights(double mu, double tol, double& tail) {
  std::vector<double> w;
  double p = std::exp(-mu), cum = 0.0;
  for (int k = 0;; ++k) {
    if (k > 0) p *= mu / k;
    w.push_back(p);
    cum += p;
    if (1.0 - cum <= tol && k >= mu) break;
    if (k > 100000) break;
  }
  tail = std::max(0.0, 1.0 - cum);
  return w;
}

template <class Step>
std::vector<double> uniformized(const TruncatedChain& chain, std::vector<double> v, double t, double tol,
                                double* error, Step step) {
  if (t < 0.0) throw Error("time must be non-negative");
  const double lambda = chain.max_exit_rate();
  if (t == 0.0 || lambda == 0.0) return v;
  const double total = lambda * t;
  const int slices = std::max(1, static_cast<int>(std::ceil(total / kSliceMean)));
  const double mu = total / slices;
  double tail = 0.0;
  auto w = poisson_weights(mu, tol / slices, tail);
  std::vector<double> acc(v.size()), next(v.size());
  for (int s = 0; s < slices; ++s) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t k = 0; k < w.size(); ++k) {
      for (std::size_t i = 0; i < v.size(); ++i) acc[i] += w[k] * v[i];
      if (k + 1 < w.size()) {
        step(v, next, lambda);
        std::swap(v, next);
      }
    }
    std::swap(v, acc);
    if (error) *error += tail;
  }
  return v;
}

// Stiff chains (a few huge exit rates) make the Poisson series long. Up to this many
// states a dense exponential by scaling and squaring is used instead when cheaper.
constexpr std::size_t kDenseExpLimit = 1500;

class Propagator {
 public:
  Propagator(const TruncatedChain& chain, double tol) : chain_(chain), tol_(tol) {}

  std::vector<double> row(std::vector<double> v, double t, double* error) {
    if (row_dense(t)) {
      const Eigen::MatrixXd& P = exp_of(t);
      Eigen::Map<const Eigen::RowVectorXd> in(v.data(), static_cast<Eigen::Index>(v.size()));
      Eigen::RowVectorXd out = in * P;
      return std::vector<double>(out.data(), out.data() + out.size());
    }
    return uniformized(chain_, std::move(v), t, tol_, error,
                       [&](const std::vector<double>& in, std::vector<double>& out, double lambda) {
                         for (std::size_t s = 0; s < in.size(); ++s) out[s] = in[s] * (1.0 - chain_.exit_rate(s) / lambda);
                         for (std::size_t s = 0; s < in.size(); ++s) {
                           if (in[s] == 0.0) continue;
                           for (const auto& tr : chain_.row(s)) out[tr.target] += in[s] * tr.rate / lambda;
                         }
                       });
  }

  std::vector<double> column(std::vector<double> v, double t, double* error) {
    if (row_dense(t)) {
      const Eigen::MatrixXd& P = exp_of(t);
      Eigen::Map<const Eigen::VectorXd> in(v.data(), static_cast<Eigen::Index>(v.size()));
      Eigen::VectorXd out = P * in;
      return std::vector<double>(out.data(), out.data() + out.size());
    }
    return uniformized(chain_, std::move(v), t, tol_, error,
                       [&](const std::vector<double>& in, std::vector<double>& out, double lambda) {
                         for (std::size_t s = 0; s < in.size(); ++s) {
                           double x = in[s] * (1.0 - chain_.exit_rate(s) / lambda);
                           for (const auto& tr : chain_.row(s)) x += tr.rate / lambda * in[tr.target];
                           out[s] = x;
                         }
                       });
  }

  bool row_dense(double t) const {
    if (t < 0.0) throw Error("time must be non-negative");
    const double n = static_cast<double>(chain_.size());
    if (t == 0.0 || chain_.size() > kDenseExpLimit) return false;
    const double series = chain_.max_exit_rate() * t * static_cast<double>(chain_.nonzeros() + chain_.size());
    return series > n * n * n;
  }

  // Prepares e^{Q h 2^-k} for k = 0..levels by squaring up from the smallest step.
  void prepare_ladder(double h, int levels) {
    if (!row_dense(h)) return;
    double small = std::ldexp(h, -levels);
    Eigen::MatrixXd P = exp_of(small);
    for (int k = levels - 1; k >= 0; --k) {
      P = P * P;
      cache_.insert_or_assign(std::ldexp(h, -k), P);
    }
  }

 private:
  // Exponentials are reused for times equal up to rounding of the caller's arithmetic.
  const Eigen::MatrixXd& exp_of(double t) {
    auto it = cache_.lower_bound(t * (1.0 - 1e-12));
    if (it != cache_.end() && it->first <= t * (1.0 + 1e-12)) return it->second;
    if (cache_.size() > 64) cache_.clear();
    const auto n = static_cast<Eigen::Index>(chain_.size());
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t s = 0; s < chain_.size(); ++s) {
      Q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = -chain_.exit_rate(s);
      for (const auto& tr : chain_.row(s)) Q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(tr.target)) += tr.rate;
    }
    Eigen::MatrixXd P = (Q * t).exp();
    return cache_.emplace(t, std::move(P)).first->second;
  }

  const TruncatedChain& chain_;
  double tol_;
  std::map<double, Eigen::MatrixXd> cache_;
};

}  // namespace

std::vector<double> propagate_row(const TruncatedChain& chain, std::vector<double> row, double t, double tol,
                                  double* error) {
  if (row.size() != chain.size()) throw Error("row vector has wrong length");
  return Propagator(chain, tol).row(std::move(row), t, error);
}

std::vector<double> propagate_column(const TruncatedChain& chain, std::vector<double> col, double t, double tol,
                                     double* error) {
  if (col.size() != chain.size()) throw Error("column vector has wrong length");
  return Propagator(chain, tol).column(std::move(col), t, error);
}

std::vector<double> apply_semigroup(const TruncatedChain& chain, std::span<const double> f, double t, double tol) {
  if (f.size() != chain.box().size()) throw Error("test function has wrong length");
  std::vector<double> col(chain.size());
  for (std::size_t s = 0; s < chain.size(); ++s) col[s] = f[chain.box_index(s)];
  col = propagate_column(chain, std::move(col), t, tol);
  std::vector<double> out(f.begin(), f.end());
  for (std::size_t s = 0; s < chain.size(); ++s) out[chain.box_index(s)] = col[s];
  return out;
}

namespace {

std::vector<double> point_mass(const TruncatedChain& chain, std::span<const int> x0) {
  if (!chain.box().contains(x0)) throw Error("initial state " + format_state(State(x0.begin(), x0.end())) + " lies outside the box");
  auto s = chain.chain_index(chain.box().index(x0));
  if (!s) throw Error("initial state is not part of the chain");
  std::vector<double> v(chain.size(), 0.0);
  v[*s] = 1.0;
  return v;
}

double tv_chain(const TruncatedChain& chain, const std::vector<double>& v, const Distribution& pi) {
  // pi may carry mass off the chain support; it counts fully towards the distance
  double d = 0.0, covered = 0.0;
  for (std::size_t s = 0; s < chain.size(); ++s) {
    double p = pi.p[chain.box_index(s)];
    covered += p;
    d += std::abs(v[s] - p);
  }
  d += std::max(0.0, pi.total() - covered);
  return 0.5 * d;
}

}  // namespace

TransientSolution transient_distribution(const TruncatedChain& chain, std::span<const int> x0, double t, double tol) {
  TransientSolution sol;
  sol.time = t;
  auto v = propagate_row(chain, point_mass(chain, x0), t, tol, &sol.error_bound);
  sol.dist = Distribution{chain.box(), std::vector<double>(chain.box().size(), 0.0), true};
  for (std::size_t s = 0; s < chain.size(); ++s) sol.dist.p[chain.box_index(s)] = v[s];
  return sol;
}

double tv_distance(const Distribution& mu, const Distribution& nu) {
  if (!(mu.box == nu.box)) throw Error("distributions live on different boxes");
  double d = 0.0;
  for (std::size_t k = 0; k < mu.p.size(); ++k) d += std::abs(mu.p[k] - nu.p[k]);
  return std::min(1.0, 0.5 * d);
}

double mixing_time_numeric(const TruncatedChain& chain, const Distribution& pi, std::span<const int> x0, double eps,
                           MixingOptions opt) {
  if (!(eps > 0.0 && eps < 0.5)) throw Error("eps must lie in (0, 1/2)");
  if (!(pi.box == chain.box())) throw Error("distribution and chain use different boxes");
  auto v = point_mass(chain, x0);
  if (tv_chain(chain, v, pi) <= eps) return 0.0;
  Propagator prop(chain, opt.series_tolerance);
  double t = 0.0;
  while (t < opt.horizon) {
    const double h = std::min(opt.grid_step, opt.horizon - t);
    auto next = prop.row(v, h, nullptr);
    if (tv_chain(chain, next, pi) <= eps) {
      // First crossing lies in (t, t + h]. Binary refinement walks forward in halving
      // steps so that every step length recurs and dense exponentials are reused.
      const int levels = std::max(1, static_cast<int>(std::ceil(std::log2(4.0 * h / opt.time_tolerance))));
      prop.prepare_ladder(h, levels);
      double lo = 0.0;
      std::vector<double> at_lo = v;
      for (int k = 1; k <= levels; ++k) {
        const double step = std::ldexp(h, -k);
        auto m = prop.row(at_lo, step, nullptr);
        if (tv_chain(chain, m, pi) > eps) {
          lo += step;
          at_lo = std::move(m);
        }
      }
      return t + lo + std::ldexp(h, -levels);
    }
    v = std::move(next);
    t += h;
  }
  throw ConvergenceError("mixing time exceeds the horizon", opt.horizon, std::numeric_limits<double>::infinity());
}

std::vector<TvPoint> tv_curve(const TruncatedChain& chain, const Distribution& pi, std::span<const int> x0,
                              std::span<const double> times, double rate, double series_tol) {
  std::vector<double> sorted(times.begin(), times.end());
  std::sort(sorted.begin(), sorted.end());
  auto v = point_mass(chain, x0);
  const double px = pi.at(x0);
  Propagator prop(chain, series_tol);
  double t = 0.0;
  std::vector<TvPoint> out;
  for (double s : sorted) {
    v = prop.row(v, s - t, nullptr);
    t = s;
    out.push_back({s, tv_chain(chain, v, pi), px > 0.0 ? 2.0 / px * std::exp(-rate * s) : INFINITY});
  }
  return out;
}

DecayCheck l2_decay_check(const TruncatedChain& chain, const Distribution& pi, std::span<const double> f, double C,
                          std::span<const double> times, double slack) {
  auto var = [&](std::span<const double> g) {
    double m = 0.0, v = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) m += pi.p[k] * g[k];
    for (std::size_t k = 0; k < g.size(); ++k) v += pi.p[k] * (g[k] - m) * (g[k] - m);
    return v;
  };
  const double v0 = var(f);
  DecayCheck out;
  for (double t : times) {
    auto g = apply_semigroup(chain, f, t);
    DecayMargin m;
    m.t = t;
    m.variance = var(g);
    m.bound = std::exp(-2.0 * C * t) * v0;
    m.margin = m.bound + slack - m.variance;
    if (m.margin < 0.0) {
      out.ok = false;
      if (!out.first_violation) out.first_violation = t;
    }
    out.margins.push_back(m);
  }
  return out;
}

State Trajectory::state(std::size_t k) const {
  return State(states.begin() + static_cast<std::ptrdiff_t>(k * dim),
               states.begin() + static_cast<std::ptrdiff_t>((k + 1) * dim));
}

Trajectory ssa_simulate(const ReactionNetwork& net, std::span<const int> x0, double horizon, std::uint64_t seed,
                        SsaOptions options) {
  if (!(horizon > 0.0)) throw Error("horizon must be positive");
  if (x0.size() != net.dim()) throw Error("initial state has wrong dimension");
  for (int v : x0)
    if (v < 0) throw Error("initial state must be non-negative");
  std::mt19937_64 rng(seed);
  auto open01 = [&] { return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53; };
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  Trajectory tr;
  tr.dim = net.dim();
  tr.horizon = horizon;
  tr.seed = seed;
  State x(x0.begin(), x0.end());
  tr.times.push_back(0.0);
  tr.states.insert(tr.states.end(), x.begin(), x.end());

  std::vector<std::vector<int>> vec;
  for (const auto& r : net.reactions) vec.push_back(reaction_vector(r));
  std::vector<double> a(net.reactions.size());
  double t = 0.0;
  for (std::size_t steps = 0;; ++steps) {
    if (steps >= options.max_steps) throw Error("simulation step cap exceeded");
    double a0 = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) {
      a[r] = intensity(net.reactions[r], net.kinetics, x);
      a0 += a[r];
    }
    if (a0 <= 0.0) break;
    t += -std::log(open01()) / a0;
    if (t > horizon) break;
    double target = unit() * a0, cum = 0.0;
    std::size_t pick = a.size() - 1;
    for (std::size_t r = 0; r < a.size(); ++r) {
      cum += a[r];
      if (target < cum && a[r] > 0.0) {
        pick = r;
        break;
      }
    }
    while (a[pick] <= 0.0) --pick;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += vec[pick][i];
    tr.times.push_back(t);
    tr.states.insert(tr.states.end(), x.begin(), x.end());
  }
  return tr;
}

std::map<State, double> occupancy(const Trajectory& traj, double burnin) {
  std::map<State, double> occ;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double a = std::max(traj.times[k], burnin);
    const double b = k + 1 < traj.size() ? traj.times[k + 1] : traj.horizon;
    if (b > a) occ[traj.state(k)] += b - a;
  }
  return occ;
}

EmpiricalComparison empirical_vs_stationary(const Trajectory& traj, const Distribution& pi, double burnin) {
  if (!(traj.horizon - burnin > 0.0)) throw Error("burn-in leaves an empty averaging window");
  if (pi.box.dim() != traj.dim) throw Error("distribution and trajectory dimensions differ");
  EmpiricalComparison out;
  out.window = traj.horizon - burnin;
  std::vector<double> occ(pi.box.size(), 0.0);
  double outside = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double a = std::max(traj.times[k], burnin);
    const double b = k + 1 < traj.size() ? traj.times[k + 1] : traj.horizon;
    if (b <= a) continue;
    std::span<const int> x(traj.states.data() + k * traj.dim, traj.dim);
    if (pi.box.contains(x))
      occ[pi.box.index(x)] += (b - a) / out.window;
    else
      outside += (b - a) / out.window;
  }
  // Everything off the box is lumped into one atom on both sides.
  double d = std::abs(outside - std::max(0.0, 1.0 - pi.total()));
  for (std::size_t k = 0; k < occ.size(); ++k) d += std::abs(occ[k] - pi.p[k]);
  out.tv = 0.5 * d;
  out.outside_mass = outside;
  return out;
}

}  // namespace ergograph
