#ifndef ERGOGRAPH_CTMC_HPP
#define ERGOGRAPH_CTMC_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergograph/network.hpp"

namespace ergograph {

// Rectangular region {0..upper_1} x ... x {0..upper_d}, indexed in mixed radix
// with the first coordinate varying fastest.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<int> upper);

  std::size_t dim() const { return upper_.size(); }
  std::size_t size() const { return size_; }
  const std::vector<int>& upper() const { return upper_; }

  bool contains(std::span<const int> x) const;
  std::size_t index(std::span<const int> x) const;
  State state(std::size_t idx) const;
  void state(std::size_t idx, std::span<int> out) const;
  std::size_t stride(std::size_t i) const { return stride_[i]; }
  std::string describe() const;  // "[25,25]"

  bool operator==(const Box& o) const { return upper_ == o.upper_; }

 private:
  std::vector<int> upper_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 0;
};

Box parse_box(const std::string& text);  // "25,25" or "[25,25]"

struct Transition {
  std::size_t target;  // chain index
  double rate;
};

// Generator of a network restricted to the states of a box. Transitions leaving the
// box are dropped and do not count towards exit rates. Rows are stored by ascending
// target, over a support of chain states that may be a subset of the box.
class TruncatedChain {
 public:
  TruncatedChain() = default;
  TruncatedChain(Box box, std::vector<std::size_t> support, std::vector<std::size_t> row_start,
                 std::vector<Transition> entries, int max_jump);

  // Chain over the whole box from explicit (from, to, rate) triples on box indices.
  static TruncatedChain from_triples(Box box, const std::vector<std::tuple<std::size_t, std::size_t, double>>& triples);

  const Box& box() const { return box_; }
  std::size_t size() const { return support_.size(); }
  std::size_t box_index(std::size_t s) const { return support_[s]; }
  std::optional<std::size_t> chain_index(std::size_t box_idx) const;
  State state(std::size_t s) const { return box_.state(support_[s]); }
  bool covers_box() const { return support_.size() == box_.size(); }

  std::span<const Transition> row(std::size_t s) const {
    return {entries_.data() + row_start_[s], row_start_[s + 1] - row_start_[s]};
  }
  double exit_rate(std::size_t s) const { return exit_[s]; }
  double max_exit_rate() const;
  double rate(std::size_t from, std::size_t to) const;  // 0 when absent
  std::size_t nonzeros() const { return entries_.size(); }
  int max_jump() const { return max_jump_; }  // largest |displacement| coordinate

  // Chain restricted to the listed chain states; transitions to other states are dropped.
  TruncatedChain restricted(std::span<const std::size_t> keep) const;

 private:
  Box box_;
  std::vector<std::size_t> support_;
  std::vector<std::size_t> inverse_;  // box index -> chain index or npos
  std::vector<std::size_t> row_start_;
  std::vector<Transition> entries_;
  std::vector<double> exit_;
  int max_jump_ = 1;
};

double intensity(const Reaction& r, std::span<const ThetaRule> kinetics, std::span<const int> x);

struct Jump {
  std::vector<int> displacement;
  double rate;
};

// Non-zero transition rates out of x, summed over reactions with equal displacement,
// ordered by first contributing reaction.
std::vector<Jump> transition_rates(const ReactionNetwork& net, std::span<const int> x);

TruncatedChain build_truncated_chain(const ReactionNetwork& net, const Box& box);

// Strongly connected components, each sorted ascending, in order of smallest member.
std::vector<std::vector<std::size_t>> communicating_classes(const TruncatedChain& chain);
bool is_irreducible(const TruncatedChain& chain);
// Restriction to the closed class reachable from `seed` (a box state).
TruncatedChain restrict_to_closed_class(const TruncatedChain& chain, std::span<const int> seed);

// Probability vector indexed by box index.
struct Distribution {
  Box box;
  std::vector<double> p;
  bool normalized = true;

  double at(std::span<const int> x) const;
  double total() const;
  Distribution renormalized() const;
};

// Stationary law as a rule on the whole lattice, evaluated in log space.
class PiRule {
 public:
  virtual ~PiRule() = default;
  virtual double log_pi(std::span<const int> x) const = 0;
  virtual std::string name() const = 0;
  double pi(std::span<const int> x) const;
  Distribution on_box(const Box& box) const;  // exact values, not renormalized
};

// pi(x) proportional to prod_i c_i^{x_i} / prod_{j<=x_i} theta_i(j), normalized over the lattice.
class ProductFormRule : public PiRule {
 public:
  ProductFormRule(std::vector<ThetaRule> kinetics, std::vector<double> c);
  double log_pi(std::span<const int> x) const override;
  std::string name() const override { return "product-form"; }
  double log_weight(std::size_t i, int n) const;  // unnormalized per-species log factor

 private:
  std::vector<ThetaRule> kinetics_;
  std::vector<double> c_;
  std::vector<double> log_norm_;
  mutable std::vector<std::vector<double>> tables_;
};

struct AutocatalyticParams {
  double kappa1 = 1.0, kappa2 = 1.0, delta = 1.0, rho = 1.0;
};

class AutocatalyticRule : public PiRule {
 public:
  explicit AutocatalyticRule(AutocatalyticParams params);
  double log_pi(std::span<const int> x) const override;
  std::string name() const override { return "autocatalytic"; }
  const AutocatalyticParams& params() const { return params_; }

 private:
  AutocatalyticParams params_;
  double gamma1_, gamma2_, log_m_, log_ratio_;
};

// Independent geometric coordinates, pi(x) = prod (1-r) r^{x_i}.
class GeometricRule : public PiRule {
 public:
  GeometricRule(std::size_t dim, double ratio);
  double log_pi(std::span<const int> x) const override;
  std::string name() const override { return "geometric"; }

 private:
  std::size_t dim_;
  double ratio_;
};

// Values taken from a distribution on a box; zero outside it.
class TableRule : public PiRule {
 public:
  explicit TableRule(Distribution dist);
  double log_pi(std::span<const int> x) const override;
  std::string name() const override { return "table"; }

 private:
  Distribution dist_;
};

struct ProductFormResult {
  Distribution dist;      // renormalized over the box
  double boundary_mass;   // lattice mass on the upper faces of the box
  double outside_mass;    // lattice mass beyond the box
};

ProductFormResult product_form_stationary(const ReactionNetwork& net, std::span<const double> c, const Box& box);

// Closed-form lattice values on the box (not renormalized).
Distribution autocatalytic_stationary(const AutocatalyticParams& params, const Box& box);

// Recognizes 0<->X1, 0<->X2, X1+X2->2X1, X1+X2->2X2 with equal conversion rates.
std::optional<AutocatalyticParams> match_autocatalytic(const ReactionNetwork& net);

struct StationaryOptions {
  std::size_t dense_limit = 4000;
  std::size_t band_budget = 50000000;  // band entries allowed for direct reduction
  double tolerance = 1e-10;
  std::size_t max_iterations = 2000000;
};

Distribution solve_stationary_truncated(const TruncatedChain& chain, StationaryOptions options = {});

struct ResidualReport {
  std::vector<double> per_state;  // (pi Q)(x) by box index
  std::vector<bool> interior;
  double max_interior = 0.0;
  double max_overall = 0.0;
};

// Interior: states at distance at least max_jump from every upper face.
ResidualReport stationarity_residual(const Distribution& pi, const TruncatedChain& chain);

}  // namespace ergograph

#endif
