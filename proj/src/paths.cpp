#include "ergograph/paths.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ergograph {

State LatticePath::end() const {
  State x = start;
  for (const auto& m : moves) x[m.coord] += m.step;
  return x;
}

std::vector<State> LatticePath::states() const {
  std::vector<State> out{start};
  State x = start;
  for (const auto& m : moves) {
    x[m.coord] += m.step;
    out.push_back(x);
  }
  return out;
}

PathFamily PathFamily::basic(std::size_t dim, double alpha, int K) {
  if (K < 1) throw Error("K must be at least 1");
  const int step = ceil_three_over(alpha);
  return basic_with_threshold(dim, alpha, K, K + step + 1);
}

PathFamily PathFamily::basic_with_threshold(std::size_t dim, double alpha, int K, int k0) {
  if (dim == 0) throw Error("path family needs a positive dimension");
  PathFamily pf;
  pf.kind_ = Kind::basic;
  pf.dim_ = dim;
  pf.alpha_ = alpha;
  pf.K_ = K;
  pf.step_ = ceil_three_over(alpha);
  if (k0 < pf.step_) throw Error("threshold must be at least ceil(3/alpha)");
  pf.threshold_ = k0;
  pf.order_.resize(dim);
  std::iota(pf.order_.begin(), pf.order_.end(), 0);
  return pf;
}

PathFamily PathFamily::layered(double alpha, int K, const CatalyticPartition& partition) {
  if (K < 1) throw Error("K must be at least 1");
  PathFamily pf;
  pf.kind_ = Kind::layered;
  pf.alpha_ = alpha;
  pf.K_ = K;
  pf.step_ = ceil_three_over(alpha);
  pf.threshold_ = partition.threshold + K + pf.step_ + 1;
  pf.partition_ = partition;
  for (const auto& layer : partition.layers) {
    std::vector<int> sorted = layer;
    std::sort(sorted.begin(), sorted.end());
    pf.order_.insert(pf.order_.end(), sorted.begin(), sorted.end());
  }
  pf.dim_ = pf.order_.size();
  std::vector<int> check = pf.order_;
  std::sort(check.begin(), check.end());
  for (std::size_t i = 0; i < check.size(); ++i)
    if (check[i] != static_cast<int>(i)) throw Error("partition layers must cover each species exactly once");
  return pf;
}

State PathFamily::intermediate(std::span<const int> x) const {
  State y(x.begin(), x.end());
  if (kind_ == Kind::layered)
    for (int& v : y) v = std::max(v, threshold_);
  return y;
}

State PathFamily::terminal(std::span<const int> x) const {
  if (x.size() != dim_) throw Error("state has wrong dimension");
  State y(x.begin(), x.end());
  if (kind_ == Kind::basic) {
    for (int& v : y)
      if (v >= threshold_) v -= step_;
  } else {
    for (int& v : y) v = std::max(v, threshold_) - step_;
  }
  return y;
}

void PathFamily::terminal_moves(std::span<const int> x, std::vector<Move>& out) const {
  out.clear();
  if (kind_ == Kind::basic) {
    for (int i : order_)
      if (x[i] >= threshold_) out.insert(out.end(), static_cast<std::size_t>(step_), Move{i, -1});
    return;
  }
  for (int i : order_)
    if (x[i] < threshold_) out.insert(out.end(), static_cast<std::size_t>(threshold_ - x[i]), Move{i, +1});
  for (int i : order_) out.insert(out.end(), static_cast<std::size_t>(step_), Move{i, -1});
}

LatticePath PathFamily::to_terminal(std::span<const int> x) const {
  LatticePath p{State(x.begin(), x.end()), {}};
  terminal_moves(x, p.moves);
  return p;
}

std::size_t PathFamily::length_bound() const {
  const auto d = static_cast<std::size_t>(dim_);
  if (kind_ == Kind::basic) return static_cast<std::size_t>(step_) * d + 1;
  return static_cast<std::size_t>(threshold_) * d + static_cast<std::size_t>(step_) * d + 1;
}

void meet_path_moves(std::span<const int> a, std::span<const int> b, std::vector<Move>& out) {
  out.clear();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) out.insert(out.end(), static_cast<std::size_t>(a[i] - b[i]), Move{static_cast<int>(i), -1});
  for (std::size_t i = 0; i < a.size(); ++i)
    if (b[i] > a[i]) out.insert(out.end(), static_cast<std::size_t>(b[i] - a[i]), Move{static_cast<int>(i), +1});
}

LatticePath meet_path(std::span<const int> a, std::span<const int> b) {
  LatticePath p{State(a.begin(), a.end()), {}};
  meet_path_moves(a, b, p.moves);
  return p;
}

bool lex_less(std::span<const int> a, std::span<const int> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

double unit_move_rate(const ReactionNetwork& net, std::span<const int> x, const Move& m) {
  double total = 0.0;
  for (const auto& r : net.reactions) {
    bool match = true;
    for (std::size_t i = 0; i < x.size() && match; ++i) {
      int want = static_cast<int>(i) == m.coord ? m.step : 0;
      if (r.product.coeffs[i] - r.source.coeffs[i] != want) match = false;
    }
    if (match) total += intensity(r, net.kinetics, x);
  }
  return total;
}

double mixing_bound_from_certificate(double C, double pi_x, double eps) {
  if (!(C > 0.0)) throw Error("certificate constant must be positive");
  if (!(eps > 0.0 && eps < 0.5)) throw Error("eps must lie in (0, 1/2)");
  if (!(pi_x > 0.0)) throw Error("pi(x) must be positive");
  return (std::abs(std::log(eps / 2.0)) + std::abs(std::log(pi_x))) / C;
}

double mixing_bound_from_certificate(const GapCertificate& cert, const PiRule& rule, std::span<const int> x,
                                     double eps) {
  return mixing_bound_from_certificate(cert.C, rule.pi(x), eps);
}

}  // namespace ergograph
