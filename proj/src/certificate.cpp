#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>

#include "ergograph/parallel.hpp"
#include "ergograph/paths.hpp"

namespace ergograph {

namespace {

std::size_t slot_of(const Move& m) { return 2 * static_cast<std::size_t>(m.coord) + (m.step > 0 ? 0 : 1); }

std::vector<double> log_pi_table(const PiRule& rule, const Box& box) {
  std::vector<double> t(box.size());
  State x(box.dim());
  for (std::size_t s = 0; s < box.size(); ++s) {
    box.state(s, x);
    t[s] = rule.log_pi(x);
  }
  return t;
}

// Unit-move rates for every box state: entry [s * 2d + slot].
std::vector<double> unit_rate_table(const ReactionNetwork& net, const Box& box) {
  const std::size_t d = box.dim();
  std::vector<std::vector<std::size_t>> by_slot(2 * d);
  for (std::size_t r = 0; r < net.reactions.size(); ++r) {
    auto v = reaction_vector(net.reactions[r]);
    int nz = -1, count = 0;
    for (std::size_t i = 0; i < d; ++i)
      if (v[i] != 0) nz = static_cast<int>(i), ++count;
    if (count == 1 && std::abs(v[nz]) == 1) by_slot[slot_of({nz, v[nz]})].push_back(r);
  }
  std::vector<double> table(box.size() * 2 * d, 0.0);
  State x(d);
  for (std::size_t s = 0; s < box.size(); ++s) {
    box.state(s, x);
    for (std::size_t slot = 0; slot < 2 * d; ++slot)
      for (std::size_t r : by_slot[slot]) table[s * 2 * d + slot] += intensity(net.reactions[r], net.kinetics, x);
  }
  return table;
}

std::ptrdiff_t index_shift(const Box& box, const Move& m) {
  return m.step * static_cast<std::ptrdiff_t>(box.stride(static_cast<std::size_t>(m.coord)));
}

// Distinct terminals of the box states, sorted lexicographically, with the log of their pi mass.
struct TerminalSet {
  std::vector<State> states;
  std::vector<std::size_t> index;
  std::vector<double> log_weight;
};

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

TerminalSet collect_terminals(const PathFamily& pf, const Box& box, const std::vector<double>& logpi) {
  std::vector<double> mass(box.size(), -std::numeric_limits<double>::infinity());
  std::vector<bool> present(box.size(), false);
  State x(box.dim());
  for (std::size_t s = 0; s < box.size(); ++s) {
    box.state(s, x);
    State t = pf.terminal(x);
    if (!box.contains(t)) throw Error("terminal " + format_state(t) + " lies outside box " + box.describe());
    std::size_t ti = box.index(t);
    present[ti] = true;
    mass[ti] = log_add(mass[ti], logpi[s]);
  }
  TerminalSet ts;
  for (std::size_t s = 0; s < box.size(); ++s)
    if (present[s]) ts.index.push_back(s);
  std::sort(ts.index.begin(), ts.index.end(),
            [&](std::size_t a, std::size_t b) { return lex_less(box.state(a), box.state(b)); });
  for (std::size_t s : ts.index) {
    ts.states.push_back(box.state(s));
    ts.log_weight.push_back(mass[s]);
  }
  return ts;
}


// Range minima of a box-indexed array along coordinate lines, by sparse tables.
class LineMin {
 public:
  LineMin(const Box& box, std::size_t axis, std::vector<double> base) : box_(box), axis_(axis) {
    levels_.push_back(std::move(base));
    const int len = box.upper()[axis] + 1;
    const std::size_t stride = box.stride(axis);
    State x(box.dim());
    for (int span = 2; span <= len; span *= 2) {
      const auto& prev = levels_.back();
      std::vector<double> next(prev.size(), std::numeric_limits<double>::infinity());
      const int half = span / 2;
      for (std::size_t s = 0; s < prev.size(); ++s) {
        box.state(s, x);
        if (x[axis] + span <= len) next[s] = std::min(prev[s], prev[s + static_cast<std::size_t>(half) * stride]);
      }
      levels_.push_back(std::move(next));
    }
  }

  // Minimum over the states start + k e_axis for k = 0..count-1.
  double query(std::size_t start, int count) const {
    if (count <= 0) return std::numeric_limits<double>::infinity();
    int k = std::bit_width(static_cast<unsigned>(count)) - 1;
    const std::size_t far = start + static_cast<std::size_t>(count - (1 << k)) * box_.stride(axis_);
    return std::min(levels_[k][start], levels_[k][far]);
  }

 private:
  const Box& box_;
  std::size_t axis_;
  std::vector<std::vector<double>> levels_;
};

// Minima of one array over the states of a meet path, and of the unit rates over its edges.
struct MeetPathScan {
  const Box& box;
  std::vector<LineMin> values;     // per axis
  std::vector<LineMin> down, up;   // rates of -e_i and +e_i moves, per axis

  // Walks the segments of the meet path from a to b and returns the minimum of the
  // state values; edge_min receives the minimum rate when rate tables are present.
  double scan(std::span<const int> a, std::span<const int> b, double* edge_min, std::size_t* length) const {
    const std::size_t d = box.dim();
    std::size_t z = box.index(a);
    double vmin = std::numeric_limits<double>::infinity();
    double emin = std::numeric_limits<double>::infinity();
    std::size_t len = 0;
    bool first = true;
    auto visit = [&](std::size_t axis, std::size_t from, int count) {
      vmin = std::min(vmin, values[axis].query(from, count));
    };
    for (std::size_t i = 0; i < d; ++i) {
      if (a[i] <= b[i]) continue;
      const int n = a[i] - b[i];
      const std::size_t low = z - static_cast<std::size_t>(n) * box.stride(i);
      visit(i, low, n + 1);
      if (edge_min && !down.empty()) emin = std::min(emin, down[i].query(low + box.stride(i), n));
      z = low;
      len += static_cast<std::size_t>(n);
      first = false;
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (b[i] <= a[i]) continue;
      const int n = b[i] - a[i];
      visit(i, z, n + 1);
      if (edge_min && !up.empty()) emin = std::min(emin, up[i].query(z, n));
      z += static_cast<std::size_t>(n) * box.stride(i);
      len += static_cast<std::size_t>(n);
      first = false;
    }
    if (first) vmin = values[0].query(z, 1);
    if (edge_min) *edge_min = emin;
    if (length) *length = len;
    return vmin;
  }
};

MeetPathScan make_scan(const Box& box, const std::vector<double>& logpi, const std::vector<double>* rates) {
  MeetPathScan scan{box, {}, {}, {}};
  const std::size_t d = box.dim();
  for (std::size_t i = 0; i < d; ++i) scan.values.emplace_back(box, i, logpi);
  if (rates) {
    for (std::size_t i = 0; i < d; ++i) {
      std::vector<double> up(box.size()), down(box.size());
      for (std::size_t s = 0; s < box.size(); ++s) {
        up[s] = (*rates)[s * 2 * d + 2 * i];
        down[s] = (*rates)[s * 2 * d + 2 * i + 1];
      }
      scan.up.emplace_back(box, i, std::move(up));
      scan.down.emplace_back(box, i, std::move(down));
    }
  }
  return scan;
}

[[noreturn]] void inactive(const Box& box, std::size_t from, const Move& m) {
  State a = box.state(from), b = a;
  b[m.coord] += m.step;
  throw InactivePathError("inactive path edge " + format_state(a) + " -> " + format_state(b), a, b);
}

}  // namespace

PathAudit audit_path_family(const PathFamily& pf, const ReactionNetwork& net, const PiRule& rule, const Box& box) {
  if (pf.dim() != box.dim() || net.dim() != box.dim()) throw Error("dimension mismatch in path audit");
  const std::size_t d = box.dim();
  const auto logpi = log_pi_table(rule, box);
  const auto rates = unit_rate_table(net, box);
  std::vector<std::uint32_t> multiplicity(box.size() * 2 * d, 0);

  PathAudit a;
  a.states = box.size();
  a.cmin = std::numeric_limits<double>::infinity();
  double log_r = -std::numeric_limits<double>::infinity();
  std::vector<Move> moves;
  State x(d), z(d);
  for (std::size_t s = 0; s < box.size(); ++s) {
    box.state(s, x);
    pf.terminal_moves(x, moves);
    z = x;
    std::size_t zi = s;
    double lmin = logpi[s];
    for (const auto& m : moves) {
      double q = rates[zi * 2 * d + slot_of(m)];
      if (!(q > 0.0)) inactive(box, zi, m);
      a.cmin = std::min(a.cmin, q);
      ++multiplicity[zi * 2 * d + slot_of(m)];
      z[m.coord] += m.step;
      if (!box.contains(z)) throw Error("path of " + format_state(x) + " leaves box " + box.describe());
      zi = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(zi) + index_shift(box, m));
      lmin = std::min(lmin, logpi[zi]);
    }
    a.Lbar = std::max(a.Lbar, moves.size() + 1);
    log_r = std::max(log_r, logpi[s] - lmin);
  }
  a.R = std::exp(log_r);
  a.Mbar = std::max<std::size_t>(1, *std::max_element(multiplicity.begin(), multiplicity.end()));

  // Edges of the terminal-pair paths, oriented from the lexicographically smaller terminal
  auto ts = collect_terminals(pf, box, logpi);
  a.terminals = ts.states.size();
  const auto scan = make_scan(box, logpi, &rates);
  for (std::size_t i = 0; i < ts.states.size(); ++i) {
    for (std::size_t j = i + 1; j < ts.states.size(); ++j) {
      double emin = 0.0;
      scan.scan(ts.states[i], ts.states[j], &emin, nullptr);
      if (!(emin > 0.0)) {
        // locate the first inactive edge for the report
        meet_path_moves(ts.states[i], ts.states[j], moves);
        std::size_t zi = ts.index[i];
        for (const auto& m : moves) {
          if (!(rates[zi * 2 * d + slot_of(m)] > 0.0)) inactive(box, zi, m);
          zi = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(zi) + index_shift(box, m));
        }
      }
      a.cmin = std::min(a.cmin, emin);
      ++a.terminal_paths;
    }
  }
  if (!std::isfinite(a.cmin)) a.cmin = 0.0;
  return a;
}

double congestion_sum_on_box(const PathFamily& pf, const PiRule& rule, const Box& box) {
  if (pf.dim() != box.dim()) throw Error("dimension mismatch in congestion sum");
  const auto logpi = log_pi_table(rule, box);
  auto ts = collect_terminals(pf, box, logpi);
  const auto scan = make_scan(box, logpi, nullptr);
  const std::size_t T = ts.states.size();
  std::vector<double> partial(64, 0.0);
  parallel_chunks(T, partial.size(), [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double lwi = ts.log_weight[i];
      if (!std::isfinite(lwi)) continue;
      for (std::size_t j = i + 1; j < T; ++j) {
        if (!std::isfinite(ts.log_weight[j])) continue;
        std::size_t len = 0;
        const double lmin = scan.scan(ts.states[i], ts.states[j], nullptr, &len);
        acc += static_cast<double>(len + 1) * std::exp(lwi + ts.log_weight[j] - lmin);
      }
    }
    partial[chunk] = acc;
  });
  double S = 0.0;
  for (double v : partial) S += v;
  return S;
}

SHistory congestion_sum_S(const PathFamily& pf, const PiRule& rule, const std::vector<Box>& boxes, double tolerance) {
  if (boxes.empty()) throw Error("congestion sum needs at least one box");
  SHistory h;
  h.tolerance = tolerance;
  for (const auto& b : boxes) {
    if (!h.history.empty() && b.size() <= h.history.back().first.size())
      throw Error("boxes must be strictly increasing");
    h.history.emplace_back(b, congestion_sum_on_box(pf, rule, b));
  }
  for (std::size_t k = 1; k < h.history.size(); ++k) {
    double prev = h.history[k - 1].second, cur = h.history[k].second;
    h.relative_increments.push_back(cur > 0.0 ? std::abs(cur - prev) / cur : 0.0);
  }
  if (h.relative_increments.empty()) {
    h.diagnostic = "a single box gives no increment to judge convergence";
    return h;
  }
  h.shrinking = true;
  for (std::size_t k = 2; k < h.history.size(); ++k) {
    const double before = h.history[k - 1].second - h.history[k - 2].second;
    const double now = h.history[k].second - h.history[k - 1].second;
    if (!(now < before)) h.shrinking = false;
  }
  const double last = h.relative_increments.back();
  h.converged = h.shrinking && last <= tolerance;
  char buf[200];
  if (h.converged)
    std::snprintf(buf, sizeof buf, "converged: last relative increment %.3g within tolerance %.3g", last, tolerance);
  else if (h.shrinking)
    std::snprintf(buf, sizeof buf, "increments shrinking but last relative increment %.3g exceeds tolerance %.3g",
                  last, tolerance);
  else
    std::snprintf(buf, sizeof buf, "increments do not shrink (last relative increment %.3g): S appears to diverge",
                  last);
  h.diagnostic = buf;
  return h;
}

double SHistory::with_tail_allowance() const {
  if (history.empty()) return 0.0;
  double s = history.back().second;
  if (history.size() >= 2) s += std::abs(s - history[history.size() - 2].second);
  return s;
}

GapCertificate certify_gap(const PathFamily& pf, const ReactionNetwork& net, const PiRule& rule,
                           const std::vector<Box>& boxes, double s_tolerance) {
  if (boxes.empty()) throw Error("certificate needs at least one box");
  GapCertificate c;
  c.alpha = pf.alpha();
  c.K = pf.K();
  c.kind = pf.kind();
  c.threshold = pf.threshold();
  c.partition = pf.partition();
  c.audit = audit_path_family(pf, net, rule, boxes.back());
  c.S = congestion_sum_S(pf, rule, boxes, s_tolerance);
  c.S_used = c.S.with_tail_allowance();
  const auto& a = c.audit;
  c.C = a.cmin / (16.0 * static_cast<double>(a.Lbar) * static_cast<double>(a.Mbar) * a.R + 4.0 * c.S_used);
  if (!(a.cmin > 0.0)) {
    c.reason = "no positive lower bound on path transition rates";
  } else if (!c.S.shrinking) {
    c.reason = c.S.diagnostic;
  } else if (!(std::isfinite(c.C) && c.C > 0.0)) {
    c.reason = "certificate constant is not finite and positive";
  } else {
    c.established = true;
  }
  return c;
}

}  // namespace ergograph
