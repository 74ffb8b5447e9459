#ifndef ERGOGRAPH_NETWORK_HPP
#define ERGOGRAPH_NETWORK_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ergograph/error.hpp"

namespace ergograph {

// Stoichiometric vector over the species of a network.
struct Complex {
  std::vector<int> coeffs;

  bool is_zero() const;
  int order() const;  // sum of coefficients
  auto operator<=>(const Complex&) const = default;
};

struct Reaction {
  Complex source;
  Complex product;
  double kappa = 1.0;
};

// Per-species kinetics. theta(n) is the rate factor contributed by the n-th molecule.
class ThetaRule {
 public:
  enum class Kind { mass_action, power, falling_factorial_poly };

  static ThetaRule mass_action();
  static ThetaRule power(double beta);
  // theta(n) = c1 n + c2 n(n-1) + ... + cJ n(n-1)...(n-J+1)
  static ThetaRule poly(std::vector<double> coeffs);

  double operator()(long n) const;
  Kind kind() const { return kind_; }
  double beta() const { return beta_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  std::string describe() const;

  bool operator==(const ThetaRule&) const = default;

 private:
  ThetaRule() = default;
  Kind kind_ = Kind::mass_action;
  double beta_ = 1.0;
  std::vector<double> coeffs_;
};

struct ReactionNetwork {
  std::vector<std::string> species;
  std::vector<Reaction> reactions;
  std::vector<ThetaRule> kinetics;  // one per species

  std::size_t dim() const { return species.size(); }
  // Distinct complexes in order of first appearance (source before product).
  std::vector<Complex> complexes() const;
  int species_index(std::string_view name) const;  // -1 when absent
  bool all_mass_action() const;
};

ReactionNetwork parse_network(std::string_view text);
ReactionNetwork load_network(const std::string& path);
std::string format_network(const ReactionNetwork& net);
std::string format_complex(const ReactionNetwork& net, const Complex& y);

std::vector<int> reaction_vector(const Reaction& r);

// Deterministic monomial c^y.
double monomial(std::span<const double> c, const Complex& y);

struct BalanceReport {
  std::vector<Complex> complexes;
  std::vector<double> inflow;
  std::vector<double> outflow;
  std::vector<double> residuals;  // outflow - inflow, per complex
  double max_abs_residual = 0.0;
  double max_flux = 0.0;
  double relative_residual = 0.0;
  bool balanced = false;
};

BalanceReport verify_complex_balanced(const ReactionNetwork& net, std::span<const double> c,
                                      double rel_tol = 1e-12);

struct BalanceSearchOptions {
  int max_iterations = 10000;
  double tolerance = 1e-10;
};

std::optional<std::vector<double>> search_complex_balanced(const ReactionNetwork& net,
                                                           std::span<const double> initial,
                                                           BalanceSearchOptions options = {});

// One damped Newton step of the search, in log coordinates. A balanced point is fixed.
std::vector<double> balance_search_step(const ReactionNetwork& net, std::span<const double> c);

// Species layers: layer 0 has direct inflow and outflow, layer k is fed and drained
// by a catalyst from an earlier layer.
struct CatalyticPartition {
  std::vector<std::vector<int>> layers;
  int threshold = 1;
  // Catalyst species used for the birth and death of each species, -1 for layer 0.
  std::vector<int> birth_catalyst;
  std::vector<int> death_catalyst;
  std::vector<int> layer_of;
};

std::optional<CatalyticPartition> derive_catalytic_partition(const ReactionNetwork& net);

// Explains why derive_catalytic_partition fails, empty string when it succeeds.
std::string partition_failure_reason(const ReactionNetwork& net);

struct TailDecay {
  double alpha = 1.0;
  int K = 2;
};

inline constexpr double kDefaultAlphas[] = {1.0, 0.5, 0.25};

// Smallest n0 >= 1 with theta(n) >= c * n^alpha for every n >= n0.
std::optional<long> tail_threshold(const ThetaRule& theta, double c, double alpha);

// Finds alpha and K with pi(x)/pi(x - e_i) <= x_i^-alpha for x_i >= K under a product form.
std::optional<TailDecay> tail_decay_parameters(const ReactionNetwork& net, std::span<const double> c,
                                               std::span<const double> alphas = kDefaultAlphas);

// Same search for explicit per-species ratio bounds pi(x)/pi(x - e_i) <= b_i / n.
std::optional<TailDecay> tail_decay_from_ratio_bounds(std::span<const double> b,
                                                      std::span<const double> alphas = kDefaultAlphas);

int ceil_three_over(double alpha);

}  // namespace ergograph

#endif
