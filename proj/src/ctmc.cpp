#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

#include "ergograph/ctmc.hpp"

namespace ergograph {

namespace {
constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
}

// ---------------------------------------------------------------------------
// Box

Box::Box(std::vector<int> upper) : upper_(std::move(upper)) {
  if (upper_.empty()) throw Error("box needs at least one coordinate");
  stride_.resize(upper_.size());
  std::size_t total = 1;
  for (std::size_t i = 0; i < upper_.size(); ++i) {
    if (upper_[i] < 0) throw Error("box caps must be non-negative");
    stride_[i] = total;
    std::size_t radix = static_cast<std::size_t>(upper_[i]) + 1;
    if (total > std::numeric_limits<std::size_t>::max() / radix) throw Error("state count overflow");
    total *= radix;
  }
  size_ = total;
}

bool Box::contains(std::span<const int> x) const {
  if (x.size() != upper_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < 0 || x[i] > upper_[i]) return false;
  return true;
}

std::size_t Box::index(std::span<const int> x) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) idx += stride_[i] * static_cast<std::size_t>(x[i]);
  return idx;
}

void Box::state(std::size_t idx, std::span<int> out) const {
  for (std::size_t i = 0; i < upper_.size(); ++i) {
    std::size_t radix = static_cast<std::size_t>(upper_[i]) + 1;
    out[i] = static_cast<int>(idx % radix);
    idx /= radix;
  }
}

State Box::state(std::size_t idx) const {
  State x(upper_.size());
  state(idx, x);
  return x;
}

std::string Box::describe() const {
  std::string s = "[";
  for (std::size_t i = 0; i < upper_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(upper_[i]);
  }
  return s + "]";
}

Box parse_box(const std::string& text) {
  std::string t;
  for (char ch : text)
    if (ch != '[' && ch != ']' && ch != ' ') t += ch;
  std::vector<int> caps;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      int v = std::stoi(item, &used);
      if (used != item.size()) throw Error("");
      caps.push_back(v);
    } catch (...) {
      throw Error("malformed box '" + text + "'");
    }
  }
  return Box(caps);
}

// ---------------------------------------------------------------------------
// Chain

TruncatedChain::TruncatedChain(Box box, std::vector<std::size_t> support, std::vector<std::size_t> row_start,
                               std::vector<Transition> entries, int max_jump)
    : box_(std::move(box)),
      support_(std::move(support)),
      row_start_(std::move(row_start)),
      entries_(std::move(entries)),
      max_jump_(max_jump) {
  inverse_.assign(box_.size(), npos);
  for (std::size_t s = 0; s < support_.size(); ++s) inverse_[support_[s]] = s;
  exit_.assign(support_.size(), 0.0);
  for (std::size_t s = 0; s < support_.size(); ++s)
    for (const auto& t : row(s)) exit_[s] += t.rate;
}

TruncatedChain TruncatedChain::from_triples(Box box,
                                            const std::vector<std::tuple<std::size_t, std::size_t, double>>& triples) {
  const std::size_t n = box.size();
  std::vector<std::vector<Transition>> rows(n);
  int jump = 1;
  for (auto [from, to, rate] : triples) {
    if (from >= n || to >= n) throw Error("transition outside the box");
    if (from == to || rate <= 0.0) continue;
    auto a = box.state(from), b = box.state(to);
    for (std::size_t i = 0; i < a.size(); ++i) jump = std::max(jump, std::abs(a[i] - b[i]));
    rows[from].push_back({to, rate});
  }
  std::vector<std::size_t> support(n), start{0};
  std::iota(support.begin(), support.end(), 0);
  std::vector<Transition> entries;
  for (auto& r : rows) {
    std::sort(r.begin(), r.end(), [](auto& a, auto& b) { return a.target < b.target; });
    for (const auto& t : r) {
      if (!entries.empty() && entries.size() > start.back() && entries.back().target == t.target)
        entries.back().rate += t.rate;
      else
        entries.push_back(t);
    }
    start.push_back(entries.size());
  }
  return TruncatedChain(std::move(box), std::move(support), std::move(start), std::move(entries), jump);
}

std::optional<std::size_t> TruncatedChain::chain_index(std::size_t box_idx) const {
  if (box_idx >= inverse_.size() || inverse_[box_idx] == npos) return std::nullopt;
  return inverse_[box_idx];
}

double TruncatedChain::max_exit_rate() const {
  double m = 0.0;
  for (double e : exit_) m = std::max(m, e);
  return m;
}

double TruncatedChain::rate(std::size_t from, std::size_t to) const {
  auto r = row(from);
  auto it = std::lower_bound(r.begin(), r.end(), to, [](const Transition& t, std::size_t v) { return t.target < v; });
  return (it != r.end() && it->target == to) ? it->rate : 0.0;
}

TruncatedChain TruncatedChain::restricted(std::span<const std::size_t> keep) const {
  std::vector<std::size_t> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> remap(size(), npos);
  for (std::size_t k = 0; k < sorted.size(); ++k) remap[sorted[k]] = k;
  std::vector<std::size_t> support, start{0};
  std::vector<Transition> entries;
  for (std::size_t s : sorted) {
    support.push_back(support_[s]);
    for (const auto& t : row(s))
      if (remap[t.target] != npos) entries.push_back({remap[t.target], t.rate});
    start.push_back(entries.size());
  }
  return TruncatedChain(box_, std::move(support), std::move(start), std::move(entries), max_jump_);
}

double intensity(const Reaction& r, std::span<const ThetaRule> kinetics, std::span<const int> x) {
  double v = r.kappa;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int j = 0; j < r.source.coeffs[i]; ++j) {
      double f = kinetics[i](x[i] - j);
      if (f == 0.0) return 0.0;
      v *= f;
    }
  }
  return v;
}

std::vector<Jump> transition_rates(const ReactionNetwork& net, std::span<const int> x) {
  std::vector<Jump> out;
  for (const auto& r : net.reactions) {
    double lam = intensity(r, net.kinetics, x);
    if (lam == 0.0) continue;
    auto v = reaction_vector(r);
    auto it = std::find_if(out.begin(), out.end(), [&](const Jump& j) { return j.displacement == v; });
    if (it == out.end())
      out.push_back({std::move(v), lam});
    else
      it->rate += lam;
  }
  return out;
}

TruncatedChain build_truncated_chain(const ReactionNetwork& net, const Box& box) {
  if (box.dim() != net.dim()) throw Error("box dimension does not match the network");
  const std::size_t n = box.size();
  int jump = 1;
  std::vector<std::vector<int>> vectors;
  for (const auto& r : net.reactions) {
    vectors.push_back(reaction_vector(r));
    for (int v : vectors.back()) jump = std::max(jump, std::abs(v));
  }
  std::vector<std::size_t> support(n), start;
  std::iota(support.begin(), support.end(), 0);
  start.reserve(n + 1);
  start.push_back(0);
  std::vector<Transition> entries;
  State x(box.dim()), y(box.dim());
  std::vector<Transition> row;
  for (std::size_t s = 0; s < n; ++s) {
    box.state(s, x);
    row.clear();
    for (std::size_t k = 0; k < net.reactions.size(); ++k) {
      double lam = intensity(net.reactions[k], net.kinetics, x);
      if (lam == 0.0) continue;
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + vectors[k][i];
      if (!box.contains(y)) continue;
      row.push_back({box.index(y), lam});
    }
    std::sort(row.begin(), row.end(), [](auto& a, auto& b) { return a.target < b.target; });
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k > 0 && row[k].target == row[k - 1].target)
        entries.back().rate += row[k].rate;
      else
        entries.push_back(row[k]);
    }
    start.push_back(entries.size());
  }
  return TruncatedChain(box, std::move(support), std::move(start), std::move(entries), jump);
}

std::vector<std::vector<std::size_t>> communicating_classes(const TruncatedChain& chain) {
  // Iterative Tarjan
  const std::size_t n = chain.size();
  std::vector<std::size_t> index(n, npos), low(n, 0), stack;
  std::vector<bool> on_stack(n, false);
  std::vector<std::vector<std::size_t>> classes;
  std::size_t counter = 0;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (node, next edge position)
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != npos) continue;
    call.push_back({root, 0});
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      if (pos == 0 && index[v] == npos) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      auto r = chain.row(v);
      if (pos < r.size()) {
        std::size_t w = r[pos].target;
        ++pos;
        if (index[w] == npos) {
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        classes.push_back(std::move(comp));
      }
      std::size_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  std::sort(classes.begin(), classes.end(), [](auto& a, auto& b) { return a.front() < b.front(); });
  return classes;
}

bool is_irreducible(const TruncatedChain& chain) { return communicating_classes(chain).size() == 1; }

TruncatedChain restrict_to_closed_class(const TruncatedChain& chain, std::span<const int> seed) {
  if (!chain.box().contains(seed)) throw Error("seed state outside the box");
  auto start = chain.chain_index(chain.box().index(seed));
  if (!start) throw Error("seed state outside the chain support");
  auto classes = communicating_classes(chain);
  std::vector<std::size_t> class_of(chain.size());
  for (std::size_t c = 0; c < classes.size(); ++c)
    for (std::size_t s : classes[c]) class_of[s] = c;
  std::vector<bool> closed(classes.size(), true);
  for (std::size_t s = 0; s < chain.size(); ++s)
    for (const auto& t : chain.row(s))
      if (class_of[t.target] != class_of[s]) closed[class_of[s]] = false;

  std::vector<bool> seen(chain.size(), false);
  std::vector<std::size_t> queue{*start};
  seen[*start] = true;
  std::vector<std::size_t> reachable_closed;
  for (std::size_t q = 0; q < queue.size(); ++q) {
    std::size_t s = queue[q];
    if (closed[class_of[s]] &&
        std::find(reachable_closed.begin(), reachable_closed.end(), class_of[s]) == reachable_closed.end())
      reachable_closed.push_back(class_of[s]);
    for (const auto& t : chain.row(s))
      if (!seen[t.target]) {
        seen[t.target] = true;
        queue.push_back(t.target);
      }
  }
  if (reachable_closed.size() != 1)
    throw Error("seed state reaches " + std::to_string(reachable_closed.size()) + " closed classes");
  return chain.restricted(classes[reachable_closed.front()]);
}

// ---------------------------------------------------------------------------
// Distributions and lattice rules

double Distribution::at(std::span<const int> x) const { return box.contains(x) ? p[box.index(x)] : 0.0; }

double Distribution::total() const {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

Distribution Distribution::renormalized() const {
  Distribution d = *this;
  double t = total();
  if (!(t > 0.0)) throw Error("cannot renormalize a distribution with zero mass");
  for (double& v : d.p) v /= t;
  d.normalized = true;
  return d;
}

double PiRule::pi(std::span<const int> x) const { return std::exp(log_pi(x)); }

Distribution PiRule::on_box(const Box& box) const {
  Distribution d{box, std::vector<double>(box.size()), false};
  State x(box.dim());
  for (std::size_t s = 0; s < box.size(); ++s) {
    box.state(s, x);
    d.p[s] = std::exp(log_pi(x));
  }
  return d;
}

ProductFormRule::ProductFormRule(std::vector<ThetaRule> kinetics, std::vector<double> c)
    : kinetics_(std::move(kinetics)), c_(std::move(c)) {
  if (kinetics_.size() != c_.size()) throw Error("concentration vector has wrong dimension");
  tables_.resize(c_.size());
  log_norm_.resize(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (!(c_[i] > 0.0)) throw Error("concentrations must be positive");
    double mx = 0.0, sum = 1.0;  // n = 0 term has log weight 0
    bool converged = false;
    for (int n = 1; n < 2000000; ++n) {
      double lw = log_weight(i, n);
      if (lw > mx) {
        sum = sum * std::exp(mx - lw) + 1.0;
        mx = lw;
      } else {
        sum += std::exp(lw - mx);
      }
      if (lw < mx - 60.0 && log_weight(i, n) < log_weight(i, n - 1)) {
        converged = true;
        break;
      }
    }
    if (!converged) throw Error("product form is not normalizable");
    log_norm_[i] = mx + std::log(sum);
  }
}

double ProductFormRule::log_weight(std::size_t i, int n) const {
  auto& t = tables_[i];
  if (t.empty()) t.push_back(0.0);
  while (static_cast<int>(t.size()) <= n) {
    int m = static_cast<int>(t.size());
    double th = kinetics_[i](m);
    if (th <= 0.0) throw Error("kinetics vanish at a positive count");
    t.push_back(t.back() + std::log(c_[i]) - std::log(th));
  }
  return t[n];
}

double ProductFormRule::log_pi(std::span<const int> x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0) return -INFINITY;
    s += log_weight(i, x[i]) - log_norm_[i];
  }
  return s;
}

AutocatalyticRule::AutocatalyticRule(AutocatalyticParams params) : params_(params) {
  const double k = params.kappa1 + params.kappa2;
  if (!(params.kappa1 > 0 && params.kappa2 > 0 && params.delta > 0 && params.rho > 0))
    throw Error("autocatalytic parameters must be positive");
  gamma1_ = params.delta * params.kappa1 / (params.rho * k);
  gamma2_ = params.delta * params.kappa2 / (params.rho * k);
  log_m_ = std::lgamma(gamma1_ + gamma2_) - std::lgamma(gamma1_) - std::lgamma(gamma2_) - k / params.delta;
  log_ratio_ = std::log(k / params.delta);
}

double AutocatalyticRule::log_pi(std::span<const int> x) const {
  if (x.size() != 2) throw Error("autocatalytic model has two species");
  if (x[0] < 0 || x[1] < 0) return -INFINITY;
  const double a = x[0], b = x[1];
  return log_m_ - std::lgamma(a + 1) - std::lgamma(b + 1) + std::lgamma(a + gamma1_) + std::lgamma(b + gamma2_) -
         std::lgamma(a + b + gamma1_ + gamma2_) + (a + b) * log_ratio_;
}

GeometricRule::GeometricRule(std::size_t dim, double ratio) : dim_(dim), ratio_(ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("geometric ratio must lie in (0,1)");
}

double GeometricRule::log_pi(std::span<const int> x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (x[i] < 0) return -INFINITY;
    s += std::log1p(-ratio_) + x[i] * std::log(ratio_);
  }
  return s;
}

TableRule::TableRule(Distribution dist) : dist_(std::move(dist)) {}

double TableRule::log_pi(std::span<const int> x) const {
  double v = dist_.at(x);
  return v > 0.0 ? std::log(v) : -INFINITY;
}

ProductFormResult product_form_stationary(const ReactionNetwork& net, std::span<const double> c, const Box& box) {
  if (box.dim() != net.dim()) throw Error("box dimension does not match the network");
  ProductFormRule rule(net.kinetics, {c.begin(), c.end()});
  Distribution d = rule.on_box(box);
  double inside = d.total(), boundary = 0.0;
  State x(box.dim());
  for (std::size_t s = 0; s < box.size(); ++s) {
    box.state(s, x);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] == box.upper()[i]) {
        boundary += d.p[s];
        break;
      }
  }
  return {d.renormalized(), boundary, std::max(0.0, 1.0 - inside)};
}

Distribution autocatalytic_stationary(const AutocatalyticParams& params, const Box& box) {
  if (box.dim() != 2) throw Error("autocatalytic model needs a two-dimensional box");
  return AutocatalyticRule(params).on_box(box);
}

std::optional<AutocatalyticParams> match_autocatalytic(const ReactionNetwork& net) {
  if (net.dim() != 2 || net.reactions.size() != 6 || !net.all_mass_action()) return std::nullopt;
  auto cx = [](int a, int b) { return Complex{{a, b}}; };
  auto rate = [&](const Complex& s, const Complex& p) -> double {
    for (const auto& r : net.reactions)
      if (r.source == s && r.product == p) return r.kappa;
    return 0.0;
  };
  AutocatalyticParams q;
  q.kappa1 = rate(cx(0, 0), cx(1, 0));
  q.kappa2 = rate(cx(0, 0), cx(0, 1));
  double d1 = rate(cx(1, 0), cx(0, 0)), d2 = rate(cx(0, 1), cx(0, 0));
  double r1 = rate(cx(1, 1), cx(2, 0)), r2 = rate(cx(1, 1), cx(0, 2));
  if (q.kappa1 <= 0 || q.kappa2 <= 0 || d1 <= 0 || d2 <= 0 || r1 <= 0 || r2 <= 0) return std::nullopt;
  if (d1 != d2 || r1 != r2) return std::nullopt;
  q.delta = d1;
  q.rho = r1;
  return q;
}

ResidualReport stationarity_residual(const Distribution& pi, const TruncatedChain& chain) {
  const Box& box = chain.box();
  if (!(pi.box == box)) throw Error("distribution and chain use different boxes");
  ResidualReport rep;
  rep.per_state.assign(box.size(), 0.0);
  rep.interior.assign(box.size(), false);
  std::vector<double> acc(chain.size(), 0.0);
  for (std::size_t s = 0; s < chain.size(); ++s) {
    double ps = pi.p[chain.box_index(s)];
    acc[s] -= ps * chain.exit_rate(s);
    for (const auto& t : chain.row(s)) acc[t.target] += ps * t.rate;
  }
  const int r = chain.max_jump();
  State x(box.dim());
  for (std::size_t s = 0; s < chain.size(); ++s) {
    std::size_t b = chain.box_index(s);
    rep.per_state[b] = acc[s];
    box.state(b, x);
    bool inner = true;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] + r > box.upper()[i]) inner = false;
    rep.interior[b] = inner;
    rep.max_overall = std::max(rep.max_overall, std::abs(acc[s]));
    if (inner) rep.max_interior = std::max(rep.max_interior, std::abs(acc[s]));
  }
  return rep;
}

}  // namespace ergograph
