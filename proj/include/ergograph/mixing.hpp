#ifndef ERGOGRAPH_MIXING_HPP
#define ERGOGRAPH_MIXING_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ergograph/ctmc.hpp"
#include "ergograph/network.hpp"

namespace ergograph {

struct TransientSolution {
  double time = 0.0;
  Distribution dist;
  double error_bound = 0.0;  // dropped Poisson mass
};

// Law at time t started from a point mass at x0, by uniformization.
TransientSolution transient_distribution(const TruncatedChain& chain, std::span<const int> x0, double t,
                                         double tol = 1e-12);

// Row vector (over chain states) times e^{tQ}. Adds the dropped mass to *error when given.
std::vector<double> propagate_row(const TruncatedChain& chain, std::vector<double> row, double t, double tol,
                                  double* error = nullptr);
// e^{tQ} times a column vector over chain states.
std::vector<double> propagate_column(const TruncatedChain& chain, std::vector<double> col, double t, double tol,
                                     double* error = nullptr);
// P_t f for a box-indexed function.
std::vector<double> apply_semigroup(const TruncatedChain& chain, std::span<const double> f, double t,
                                    double tol = 1e-12);

double tv_distance(const Distribution& mu, const Distribution& nu);

struct MixingOptions {
  double grid_step = 0.05;
  double horizon = 1000.0;
  double time_tolerance = 1e-4;
  double series_tolerance = 1e-12;
};

// First time the law from x0 is within eps of pi in total variation: grid search for the
// first crossing, refined by bisection. Throws ConvergenceError carrying the bracket.
double mixing_time_numeric(const TruncatedChain& chain, const Distribution& pi, std::span<const int> x0, double eps,
                           MixingOptions options = {});

struct TvPoint {
  double t, tv, bound;
};

// TV(P^t(x0,.), pi) at the given times next to (2/pi(x0)) e^{-rate t}.
std::vector<TvPoint> tv_curve(const TruncatedChain& chain, const Distribution& pi, std::span<const int> x0,
                              std::span<const double> times, double rate, double series_tol = 1e-12);

struct MixingReport {
  State x0;
  double eps = 0.25;
  double tau_numeric = 0.0;
  double tau_bound = 0.0;
  double gap_used = 0.0;
  bool gap_certified = false;
};

struct DecayMargin {
  double t = 0.0;
  double variance = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound + slack - variance
};

struct DecayCheck {
  std::vector<DecayMargin> margins;
  bool ok = true;
  std::optional<double> first_violation;
};

// Var_pi(P_t f) <= e^{-2Ct} Var_pi(f) + slack at every requested t.
DecayCheck l2_decay_check(const TruncatedChain& chain, const Distribution& pi, std::span<const double> f, double C,
                          std::span<const double> times, double slack = 1e-10);

struct Trajectory {
  std::size_t dim = 0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> times;  // jump times, starting with 0
  std::vector<int> states;    // state after each jump, dim entries each

  std::size_t size() const { return times.size(); }
  State state(std::size_t k) const;
};

struct SsaOptions {
  std::size_t max_steps = 200000000;
};

// Gillespie direct method on the whole lattice.
Trajectory ssa_simulate(const ReactionNetwork& net, std::span<const int> x0, double horizon, std::uint64_t seed,
                        SsaOptions options = {});

// Time spent in each state during [burnin, horizon].
std::map<State, double> occupancy(const Trajectory& traj, double burnin = 0.0);

struct EmpiricalComparison {
  double tv = 0.0;
  double outside_mass = 0.0;  // occupancy fraction outside the box, compared as one atom
  double window = 0.0;
};

EmpiricalComparison empirical_vs_stationary(const Trajectory& traj, const Distribution& pi, double burnin);

}  // namespace ergograph

#endif
