#include <algorithm>
#include <cmath>

#include "ergograph/network.hpp"

namespace ergograph {

namespace {

bool is_unit(const Complex& y, int i) {
  for (std::size_t k = 0; k < y.coeffs.size(); ++k)
    if (y.coeffs[k] != (static_cast<int>(k) == i ? 1 : 0)) return false;
  return true;
}

// Returns the species j and multiplicity n when y = n e_j with n >= 1, else (-1, 0).
std::pair<int, int> single_species(const Complex& y) {
  int j = -1, n = 0;
  for (std::size_t k = 0; k < y.coeffs.size(); ++k) {
    if (!y.coeffs[k]) continue;
    if (j >= 0) return {-1, 0};
    j = static_cast<int>(k);
    n = y.coeffs[k];
  }
  return {j, n};
}

struct Mechanism {
  int catalyst = -1;  // -1 for a plain inflow or outflow
  int multiplicity = 0;
};

// Reactions n e_j -> n e_j + e_i (birth) or n e_j + e_i -> n e_j (death), n >= 0.
std::optional<Mechanism> find_mechanism(const ReactionNetwork& net, int i, bool birth,
                                        const std::vector<int>& layer_of, int before_layer) {
  std::optional<Mechanism> best;
  for (const auto& r : net.reactions) {
    const Complex& lean = birth ? r.source : r.product;
    const Complex& rich = birth ? r.product : r.source;
    Complex diff = rich;
    diff.coeffs[i] -= 1;
    if (diff != lean) continue;
    if (lean.is_zero()) return Mechanism{};
    auto [j, n] = single_species(lean);
    if (j < 0 || j == i) continue;
    if (layer_of[j] < 0 || layer_of[j] >= before_layer) continue;
    if (!best || j < best->catalyst || (j == best->catalyst && n < best->multiplicity)) best = Mechanism{j, n};
  }
  return best;
}

}  // namespace

std::optional<CatalyticPartition> derive_catalytic_partition(const ReactionNetwork& net) {
  const int d = static_cast<int>(net.dim());
  CatalyticPartition p;
  p.layer_of.assign(d, -1);
  p.birth_catalyst.assign(d, -1);
  p.death_catalyst.assign(d, -1);
  int threshold = 0;

  std::vector<int> layer0;
  for (int i = 0; i < d; ++i) {
    bool in = false, out = false;
    for (const auto& r : net.reactions) {
      if (r.source.is_zero() && is_unit(r.product, i)) in = true;
      if (is_unit(r.source, i) && r.product.is_zero()) out = true;
    }
    if (in && out) layer0.push_back(i);
  }
  if (layer0.empty()) return std::nullopt;
  for (int i : layer0) p.layer_of[i] = 0;
  p.layers.push_back(layer0);

  while (true) {
    const int level = static_cast<int>(p.layers.size());
    std::vector<int> next;
    for (int i = 0; i < d; ++i) {
      if (p.layer_of[i] >= 0) continue;
      auto b = find_mechanism(net, i, true, p.layer_of, level);
      auto k = find_mechanism(net, i, false, p.layer_of, level);
      if (!b || !k) continue;
      next.push_back(i);
      p.birth_catalyst[i] = b->catalyst;
      p.death_catalyst[i] = k->catalyst;
      threshold = std::max({threshold, b->multiplicity, k->multiplicity});
    }
    if (next.empty()) break;
    for (int i : next) p.layer_of[i] = level;
    p.layers.push_back(next);
  }
  if (std::any_of(p.layer_of.begin(), p.layer_of.end(), [](int l) { return l < 0; })) return std::nullopt;
  p.threshold = std::max(threshold, 1);
  return p;
}

std::string partition_failure_reason(const ReactionNetwork& net) {
  if (derive_catalytic_partition(net)) return {};
  std::vector<int> dummy(net.dim(), -1);
  bool any_open = false;
  for (std::size_t i = 0; i < net.dim(); ++i) {
    bool in = false, out = false;
    for (const auto& r : net.reactions) {
      if (r.source.is_zero() && is_unit(r.product, static_cast<int>(i))) in = true;
      if (is_unit(r.source, static_cast<int>(i)) && r.product.is_zero()) out = true;
    }
    any_open = any_open || (in && out);
  }
  if (!any_open) return "no single-species inflow/outflow";
  return "some species have no catalytic birth and death from an earlier layer";
}

int ceil_three_over(double alpha) {
  if (!(alpha > 0.0)) throw Error("alpha must be positive");
  return static_cast<int>(std::ceil(3.0 / alpha - 1e-9));
}

std::optional<long> tail_threshold(const ThetaRule& theta, double c, double alpha) {
  const double eps = 1e-12;
  auto holds = [&](long n) { return theta(n) >= c * std::pow(static_cast<double>(n), alpha) * (1.0 - eps); };
  auto settle = [&](long n_tail) {
    long n0 = std::max<long>(n_tail, 1);
    while (!holds(n0)) ++n0;
    while (n0 > 1 && holds(n0 - 1)) --n0;
    return n0;
  };

  double growth = 0.0, lead = 0.0;
  long shift = 0;
  switch (theta.kind()) {
    case ThetaRule::Kind::mass_action:
      growth = 1.0, lead = 1.0;
      break;
    case ThetaRule::Kind::power:
      growth = theta.beta(), lead = 1.0;
      break;
    case ThetaRule::Kind::falling_factorial_poly: {
      const auto& cs = theta.coeffs();
      growth = static_cast<double>(cs.size());
      if (cs.size() == 1) {
        lead = cs[0];
      } else {
        // c_J n(n-1)...(n-J+1) >= c_J (n/2)^J once n >= 2(J-1)
        lead = cs.back() / std::pow(2.0, growth);
        shift = 2 * static_cast<long>(cs.size() - 1);
      }
      break;
    }
  }
  if (growth > alpha + 1e-12) {
    double n = std::pow(c / lead, 1.0 / (growth - alpha));
    if (!std::isfinite(n) || n > 1e15) return std::nullopt;
    return settle(std::max<long>(shift, static_cast<long>(std::ceil(n))));
  }
  if (std::abs(growth - alpha) <= 1e-12 && shift == 0 && c <= lead * (1.0 + eps)) return 1;
  return std::nullopt;
}

std::optional<TailDecay> tail_decay_parameters(const ReactionNetwork& net, std::span<const double> c,
                                               std::span<const double> alphas) {
  if (c.size() != net.dim()) throw Error("concentration vector has wrong dimension");
  for (double alpha : alphas) {
    long K = 2;
    bool ok = true;
    for (std::size_t i = 0; i < net.dim() && ok; ++i) {
      auto n0 = tail_threshold(net.kinetics[i], c[i], alpha);
      if (!n0 || *n0 > 1000000) ok = false;
      else K = std::max(K, *n0);
    }
    if (ok) return TailDecay{alpha, static_cast<int>(K)};
  }
  return std::nullopt;
}

std::optional<TailDecay> tail_decay_from_ratio_bounds(std::span<const double> b, std::span<const double> alphas) {
  for (double alpha : alphas) {
    long K = 2;
    bool ok = true;
    for (double bi : b) {
      auto n0 = tail_threshold(ThetaRule::mass_action(), bi, alpha);
      if (!n0 || *n0 > 1000000) ok = false;
      else K = std::max(K, *n0);
    }
    if (ok) return TailDecay{alpha, static_cast<int>(K)};
  }
  return std::nullopt;
}

}  // namespace ergograph
