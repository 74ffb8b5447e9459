#include <algorithm>
#include <cmath>

#include "ergograph/ctmc.hpp"

namespace ergograph {

namespace {

void require_irreducible(const TruncatedChain& chain) {
  auto classes = communicating_classes(chain);
  if (classes.size() <= 1) return;
  auto largest = std::max_element(classes.begin(), classes.end(),
                                  [](auto& a, auto& b) { return a.size() < b.size(); });
  std::vector<State> stranded;
  for (auto it = classes.begin(); it != classes.end(); ++it) {
    if (it == largest) continue;
    for (std::size_t s : *it) {
      if (stranded.size() >= 64) break;
      stranded.push_back(chain.state(s));
    }
  }
  std::string msg = "truncated chain is reducible (" + std::to_string(classes.size()) +
                    " communicating classes); stranded states include";
  for (std::size_t k = 0; k < std::min<std::size_t>(stranded.size(), 8); ++k) msg += " " + format_state(stranded[k]);
  throw ReducibleChainError(msg, std::move(stranded));
}

Distribution to_box(const TruncatedChain& chain, const std::vector<double>& v) {
  Distribution d{chain.box(), std::vector<double>(chain.box().size(), 0.0), true};
  double total = 0.0;
  for (double x : v) total += std::max(x, 0.0);
  for (std::size_t s = 0; s < chain.size(); ++s) d.p[chain.box_index(s)] = std::max(v[s], 0.0) / total;
  return d;
}

// State reduction without subtractions (Grassmann-Taksar-Heyman) on a band of
// half-width w around the diagonal. Eliminating states from the highest index
// down keeps all fill-in inside the band, and every component keeps full
// relative accuracy however small it is.
std::vector<double> gth_banded(const TruncatedChain& chain, std::size_t w) {
  const std::size_t n = chain.size();
  const std::size_t span = 2 * w + 1;
  std::vector<double> band(n * span, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return band[i * span + (j + w - i)]; };
  for (std::size_t s = 0; s < n; ++s)
    for (const auto& t : chain.row(s)) at(s, t.target) += t.rate;

  std::vector<double> out_sum(n, 0.0);
  for (std::size_t k = n - 1; k >= 1; --k) {
    const std::size_t lo = k > w ? k - w : 0;
    double S = 0.0;
    for (std::size_t j = lo; j < k; ++j) S += at(k, j);
    if (!(S > 0.0)) throw Error("state reduction met a state with no exit to lower states");
    out_sum[k] = S;
    for (std::size_t i = lo; i < k; ++i) {
      const double f = at(i, k);
      if (f == 0.0) continue;
      const double g = f / S;
      double* row = &at(i, lo);
      const double* src = &at(k, lo);
      for (std::size_t j = lo; j < k; ++j, ++row, ++src) *row += g * *src;
    }
  }
  std::vector<double> pi(n, 0.0);
  pi[0] = 1.0;
  double total = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t lo = k > w ? k - w : 0;
    double v = 0.0;
    for (std::size_t i = lo; i < k; ++i) v += pi[i] * at(i, k);
    pi[k] = v / out_sum[k];
    total += pi[k];
  }
  for (double& v : pi) v /= total;
  return pi;
}

}  // namespace

Distribution solve_stationary_truncated(const TruncatedChain& chain, StationaryOptions options) {
  const std::size_t n = chain.size();
  if (n == 0) throw Error("empty chain");
  require_irreducible(chain);
  if (n == 1) return to_box(chain, {1.0});

  std::size_t width = 0;
  for (std::size_t s = 0; s < n; ++s)
    for (const auto& t : chain.row(s)) width = std::max(width, t.target > s ? t.target - s : s - t.target);
  if (n <= options.dense_limit || n * (2 * width + 1) <= options.band_budget) return to_box(chain, gth_banded(chain, width));

  // Power iteration on the uniformized kernel
  const double lambda = 1.05 * chain.max_exit_rate();
  std::vector<double> p(n, 1.0 / static_cast<double>(n)), next(n);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      next[s] += p[s] * (1.0 - chain.exit_rate(s) / lambda);
      for (const auto& t : chain.row(s)) next[t.target] += p[s] * t.rate / lambda;
    }
    if (it % 50 == 49) {
      double diff = 0.0, total = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        diff += std::abs(next[s] - p[s]);
        total += next[s];
      }
      // ||pi Q||_1 / lambda == ||pi P - pi||_1
      if (diff <= options.tolerance * total) return to_box(chain, next);
    }
    std::swap(p, next);
  }
  throw ConvergenceError("power iteration did not reach the residual tolerance", 0.0, 0.0);
}

}  // namespace ergograph
