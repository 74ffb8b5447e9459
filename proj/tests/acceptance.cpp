// Acceptance run: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "ergograph/cli.hpp"
#include "ergograph/io.hpp"

using namespace ergograph;

namespace {

std::string path_of(const std::string& name) { return std::string(ERGOGRAPH_EXAMPLES_DIR) + "/" + name + ".rn"; }
ReactionNetwork model(const std::string& name) { return load_network(path_of(name)); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::string failed;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failed += " [failed: " + what + "]";
    }
  }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<Box> doubling(std::vector<int> first, int levels) {
  std::vector<Box> out;
  for (int k = 0; k < levels; ++k) {
    out.emplace_back(first);
    for (int& v : first) v *= 2;
  }
  return out;
}

double numeric_gap(const TruncatedChain& chain) { return estimate_gap(solve_stationary_truncated(chain), chain).value; }

TruncatedChain closed_chain(const ReactionNetwork& net, const Box& box) {
  auto chain = build_truncated_chain(net, box);
  if (is_irreducible(chain)) return chain;
  return restrict_to_closed_class(chain, State(box.dim(), 0));
}

// Largest box, halving from `box`, on which the lattice pi stays representable.
double gap_near(const ReactionNetwork& net, std::vector<int> caps) {
  for (;;) {
    try {
      return numeric_gap(build_truncated_chain(net, Box(caps)));
    } catch (const Error&) {
      for (int& v : caps) v /= 2;
    }
  }
}

// A certified model with its path family, law and boxes.
struct Certified {
  std::string label;
  ReactionNetwork net;
  std::unique_ptr<PiRule> rule;
  PathFamily family;
  std::vector<Box> boxes;
};

std::vector<Certified> certified_models() {
  std::vector<Certified> out;
  {
    auto net = model("motivation");
    auto rule = std::make_unique<ProductFormRule>(net.kinetics, std::vector<double>{1});
    out.push_back({"motivation (k0=4)", net, std::move(rule), PathFamily::basic_with_threshold(1, 1.0, 2, 4),
                   doubling({40}, 7)});
  }
  {
    auto net = model("motivation");
    auto rule = std::make_unique<ProductFormRule>(net.kinetics, std::vector<double>{1});
    out.push_back({"0<->X1 (corollary family)", net, std::move(rule), PathFamily::basic(1, 1.0, 2), doubling({40}, 7)});
  }
  {
    auto net = model("key_example");
    auto part = derive_catalytic_partition(net);
    auto rule = std::make_unique<ProductFormRule>(net.kinetics, std::vector<double>{1, 1});
    out.push_back({"key example", net, std::move(rule), PathFamily::layered(1.0, 2, *part), doubling({20, 20}, 3)});
  }
  {
    auto net = model("open_cxb");
    auto rule = std::make_unique<ProductFormRule>(net.kinetics, std::vector<double>{1, 1});
    out.push_back({"open network", net, std::move(rule), PathFamily::basic(2, 1.0, 2), doubling({20, 20}, 3)});
  }
  return out;
}

// ---- criteria ----

void c01(Outcome& o) {
  Stopwatch sw;
  auto rep = verify_complex_balanced(model("open_cxb"), std::vector<double>{1, 1});
  double t = sw.seconds();
  o.detail << "open network c=(1,1): max residual " << num(rep.max_abs_residual) << ", " << num(t) << " s";
  o.require(rep.balanced && rep.max_abs_residual < 1e-12, "residual < 1e-12");
  o.require(t < 0.1, "runtime < 0.1 s");
}

void c02(Outcome& o) {
  Stopwatch sw;
  auto net = model("key_example");
  Box box({25, 25});
  auto chain = build_truncated_chain(net, box);
  // e^-2 / (x1! x2!) evaluated independently of the library's product-form code
  Distribution exact{box, std::vector<double>(box.size()), false};
  for (std::size_t i = 0; i < box.size(); ++i) {
    auto x = box.state(i);
    exact.p[i] = std::exp(-2.0 - std::lgamma(x[0] + 1.0) - std::lgamma(x[1] + 1.0));
  }
  double res = stationarity_residual(exact, chain).max_interior;
  auto solved = solve_stationary_truncated(chain);
  double tv = tv_distance(solved, exact.renormalized());
  double t = sw.seconds();
  o.detail << "key example [25,25]: interior residual " << num(res) << ", TV " << num(tv) << ", " << num(t) << " s";
  o.require(res < 1e-10, "residual < 1e-10");
  o.require(tv < 1e-8, "TV < 1e-8");
  o.require(t < 5.0, "runtime < 5 s");
}

void c03(Outcome& o) {
  auto net = model("autocatalytic");
  auto params = match_autocatalytic(net);
  o.require(params.has_value(), "autocatalytic pattern recognized");
  if (!params) return;
  Box box({30, 30});
  auto dist = autocatalytic_stationary(*params, box);
  double res = stationarity_residual(dist, build_truncated_chain(net, box)).max_interior;
  double origin = dist.renormalized().at(std::vector<int>{0, 0});
  double err = std::abs(origin - std::exp(-2.0));
  o.detail << "autocatalytic [30,30]: interior residual " << num(res) << ", |pi(0,0) - e^-2| " << num(err);
  o.require(res < 1e-8, "residual < 1e-8");
  o.require(err < 1e-10, "pi(0,0) within 1e-10");
}

void c04(Outcome& o) {
  Stopwatch sw;
  struct Case {
    const char* name;
    std::vector<int> box;
  };
  const Case cases[] = {{"motivation", {40}},       {"key_example", {15, 15}},    {"open_cxb", {12, 12}},
                        {"autocatalytic", {15, 15}}, {"counterexample", {15, 15}}, {"tandem_queue", {8, 6, 8}},
                        {"theta_power", {30}}};
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (const auto& c : cases) {
    auto chain = closed_chain(model(c.name), Box(c.box));
    auto pi = solve_stationary_truncated(chain);
    for (int k = 0; k < 100; ++k) {
      std::vector<double> f(chain.box().size());
      for (double& v : f) v = u(rng);
      auto e = dirichlet_forms(pi, chain, f);
      worst = std::max(worst, std::abs(e.standard - e.symmetric) / std::max(std::abs(e.symmetric), 1e-300));
    }
  }
  double t = sw.seconds();
  o.detail << "7 models x 100 functions: max relative |E - E*| " << num(worst) << ", " << num(t) << " s";
  o.require(worst < 1e-9, "relative difference < 1e-9");
  o.require(t < 10.0, "runtime < 10 s");
}

void c05(Outcome& o) {
  auto net = model("counterexample");
  std::vector<double> quotients;
  for (int n : {5, 9, 14}) {
    Box box({n + 3, n + 3});
    auto chain = closed_chain(net, box);
    auto pi = solve_stationary_truncated(chain);
    std::vector<std::size_t> set{box.index(std::vector<int>{n, 0}), box.index(std::vector<int>{n + 1, 1})};
    double q = witness_upper_bound(pi, chain, set);
    double target = 2.0 / (n + 1);
    o.detail << "n=" << n << ": " << num(q) << " vs " << num(target) << "; ";
    o.require(std::abs(q - target) <= 0.1 * target, "n=" + std::to_string(n) + " within 10% of 2/(n+1)");
    quotients.push_back(q);
  }
  o.require(quotients[0] > quotients[1] && quotients[1] > quotients[2], "quotients strictly decreasing");
  double prev = INFINITY;
  o.detail << "gaps";
  for (int b : {10, 15, 20, 25}) {
    Box box({b, b});
    auto chain = closed_chain(net, box);
    auto pi = solve_stationary_truncated(chain);
    double gap = estimate_gap(pi, chain).value;
    const int n = b - 3;
    std::vector<std::size_t> set{box.index(std::vector<int>{n, 0}), box.index(std::vector<int>{n + 1, 1})};
    double w = witness_upper_bound(pi, chain, set);
    o.detail << " [" << b << "] " << num(gap) << "<=" << num(w);
    o.require(gap < prev, "gap decreasing at [" + std::to_string(b) + "]");
    o.require(gap <= w + 1e-12, "gap <= witness at [" + std::to_string(b) + "]");
    prev = gap;
  }
}

void c06(Outcome& o) {
  Stopwatch sw;
  for (auto& m : certified_models()) {
    auto cert = certify_gap(m.family, m.net, *m.rule, m.boxes, 1e-4);
    double gap = gap_near(m.net, m.boxes.back().upper());
    double last = cert.S.relative_increments.empty() ? INFINITY : cert.S.relative_increments.back();
    o.detail << m.label << ": C " << num(cert.C) << " gap " << num(gap) << " dS " << num(last) << "; ";
    o.require(cert.C > 0.0, m.label + " C > 0");
    o.require(cert.S.shrinking && last < 1e-4, m.label + " S increments below 1e-4");
    o.require(cert.C <= gap + 1e-6, m.label + " C <= gap");
  }
  double t = sw.seconds();
  o.detail << num(t) << " s";
  o.require(t < 60.0, "runtime < 60 s");
}

void c07(Outcome& o) {
  auto net = model("key_example");
  auto part = derive_catalytic_partition(net);
  auto pf = PathFamily::layered(1.0, 2, *part);
  std::vector<double> vals;
  for (int b : {10, 20, 40}) {
    auto chain = build_truncated_chain(net, Box({b, b}));
    auto c = congestion_ratio(solve_stationary_truncated(chain), chain, &pf);
    vals.push_back(c.value);
    o.detail << "[" << b << "," << b << "] " << num(c.value) << " at " << format_state(c.edge_from) << "->"
             << format_state(c.edge_to) << "; ";
  }
  o.require(vals[0] < vals[1] && vals[1] < vals[2], "strictly increasing");
  o.require(vals[2] / vals[0] > 3.0, "last/first > 3");
  auto two = TruncatedChain::from_triples(Box({1}), {{0, 1, 1.0}, {1, 0, 1.0}});
  auto pi2 = solve_stationary_truncated(two);
  double c2 = congestion_ratio(pi2, two, nullptr).value;
  double g2 = estimate_gap(pi2, two).value;
  o.detail << "two-state " << num(c2) << ", gap " << num(g2);
  o.require(std::abs(c2 - 1.0) < 1e-12 && 1.0 / c2 <= g2, "two-state C_cr = 1 <= gap");
}

void c08(Outcome& o) {
  struct Case {
    std::string label;
    ReactionNetwork net;
    std::unique_ptr<PiRule> rule;
    PathFamily family;
    std::vector<Box> boxes;
    Box mix_box;
  };
  std::vector<Case> cases;
  for (auto& m : certified_models()) {
    if (m.label.rfind("0<->X1", 0) == 0) continue;  // same chain as the motivation model
    Box mix = m.net.dim() == 1 ? Box({40}) : (m.label == "open network" ? Box({20, 20}) : Box({30, 30}));
    cases.push_back({m.label, m.net, std::move(m.rule), m.family, m.boxes, mix});
  }
  {
    auto net = model("autocatalytic");
    auto params = *match_autocatalytic(net);
    std::vector<double> b(2, (params.kappa1 + params.kappa2) / params.delta);
    auto td = *tail_decay_from_ratio_bounds(b);
    cases.push_back({"autocatalytic", net, std::make_unique<AutocatalyticRule>(params),
                     PathFamily::basic(2, td.alpha, td.K), doubling({20, 20}, 3), Box({30, 30})});
  }
  for (auto& c : cases) {
    auto cert = certify_gap(c.family, c.net, *c.rule, c.boxes, 1e-4);
    auto chain = build_truncated_chain(c.net, c.mix_box);
    auto pi = solve_stationary_truncated(chain);
    State x0(c.net.dim(), 10);
    for (double eps : {0.25, 0.1}) {
      double tau = mixing_time_numeric(chain, pi, x0, eps);
      double bound = mixing_bound_from_certificate(cert, *c.rule, x0, eps);
      o.detail << c.label << " eps " << eps << ": " << num(tau) << "<=" << num(bound) << "; ";
      o.require(tau <= bound, c.label + " eps " + num(eps));
    }
  }
  auto two = TruncatedChain::from_triples(Box({1}), {{0, 1, 1.0}, {1, 0, 1.0}});
  double tau2 = mixing_time_numeric(two, solve_stationary_truncated(two), std::vector<int>{0}, 0.25);
  o.detail << "two-state " << num(tau2);
  o.require(std::abs(tau2 - 0.25 * std::log(4.0)) < 1e-4, "two-state tau = ln(4)/4");
}

void c09(Outcome& o) {
  struct Case {
    const char* name;
    std::vector<int> box;
  };
  const Case cases[] = {{"motivation", {40}}, {"key_example", {20, 20}}, {"open_cxb", {12, 12}}, {"autocatalytic", {20, 20}}};
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n01;
  const std::vector<double> times{0.1, 0.5, 1.0, 2.0, 5.0};
  double worst = INFINITY;
  for (const auto& c : cases) {
    auto chain = build_truncated_chain(model(c.name), Box(c.box));
    auto pi = solve_stationary_truncated(chain);
    double gap = estimate_gap(pi, chain).value;
    for (int k = 0; k < 5; ++k) {
      std::vector<double> f(chain.box().size());
      for (double& v : f) v = n01(rng);
      auto d = l2_decay_check(chain, pi, f, gap, times, 1e-10);
      for (const auto& m : d.margins) worst = std::min(worst, m.margin);
      o.require(d.ok, std::string(c.name) + " decay");
    }
  }
  o.detail << "4 models x 5 functions x 5 times: smallest margin " << num(worst) << "; ";
  auto two = TruncatedChain::from_triples(Box({1}), {{0, 1, 1.0}, {1, 0, 1.0}});
  auto pi2 = solve_stationary_truncated(two);
  auto d2 = l2_decay_check(two, pi2, std::vector<double>{1.0, -1.0}, 2.0, times, 0.0);
  double dev = 0.0;
  for (const auto& m : d2.margins) dev = std::max(dev, std::abs(m.variance - m.bound));
  o.detail << "two-state deviation " << num(dev);
  o.require(dev < 1e-12, "two-state equality");
}

void c10(Outcome& o) {
  struct Case {
    const char* name;
    std::unique_ptr<PiRule> rule;
    Box box;
  };
  std::vector<Case> cases;
  {
    auto net = model("key_example");
    cases.push_back({"key_example", std::make_unique<ProductFormRule>(net.kinetics, std::vector<double>{1, 1}), Box({25, 25})});
  }
  cases.push_back({"autocatalytic", std::make_unique<AutocatalyticRule>(AutocatalyticParams{}), Box({60, 60})});
  for (auto& c : cases) {
    Stopwatch sw;
    auto net = model(c.name);
    auto pi = c.rule->on_box(c.box);
    double worst = 0.0;
    for (std::uint64_t seed : {1, 2, 3}) {
      auto traj = ssa_simulate(net, State(net.dim(), 0), 1e5, seed);
      worst = std::max(worst, empirical_vs_stationary(traj, pi, 1e3).tv);
    }
    double t = sw.seconds();
    o.detail << c.name << ": max TV " << num(worst) << " (" << num(t) << " s); ";
    o.require(worst < 0.05, std::string(c.name) + " TV < 0.05");
    o.require(t < 60.0, std::string(c.name) + " runtime < 60 s");
  }
}

void c11(Outcome& o) {
  auto call = [](const std::string& file, Json& results) {
    std::string a0 = "ergograph", a1 = "check", a2 = path_of(file);
    char* argv[] = {a0.data(), a1.data(), a2.data()};
    std::ostringstream out, err;
    int code = cli::main_entry(3, argv, out, err);
    results = Json::parse(out.str())["results"];
    return code;
  };
  Json key, open, counter;
  int ck = call("key_example", key), co = call("open_cxb", open), cc = call("counterexample", counter);
  auto layers = key["partition"]["layers"];
  bool key_ok = ck == 0 && layers.size() == 2 && layers[0] == Json::array({"X2"}) && layers[1] == Json::array({"X1"}) &&
                key["partition"]["N"] == 1;
  bool open_ok = co == 0 && open["partition"]["layers"].size() == 1 && open["partition"]["layers"][0].size() == 2;
  o.detail << "key exit " << ck << " layers " << layers.dump() << "; open exit " << co << "; counterexample exit " << cc
           << " (" << counter.value("reason", std::string()) << ")";
  o.require(key_ok, "key example J0={X2}, J1={X1}, N=1");
  o.require(open_ok, "open network S0 = both species");
  o.require(cc == 2, "counterexample rejected with exit 2");
}

void slope(Outcome& o) {
  // tau bound ~ (1/C)(|ln(eps/2)| + |ln pi(x)|) against |x| ln |x| along the diagonal
  auto net = model("key_example");
  ProductFormRule rule(net.kinetics, {1, 1});
  const double C = 1.0;  // the constant cancels in the ratio
  std::vector<double> ratios;
  double prev = 0.0;
  bool increasing = true;
  for (int n = 5; n <= 40; n += 5) {
    std::vector<int> x{n, n};
    double bound = mixing_bound_from_certificate(C, rule.pi(x), 0.25);
    double norm = std::hypot(n, n);
    ratios.push_back(bound / (norm * std::log(norm)));
    increasing = increasing && bound > prev;
    prev = bound;
  }
  auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  o.detail << "bound / (|x| ln|x|) over (5,5)..(40,40) in [" << num(*lo) << ", " << num(*hi) << "]";
  o.require(increasing, "bound increasing");
  o.require(*hi / *lo < 1.5, "ratio band within a factor 1.5");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string only;
  app.add_option("--only", only, "run a single criterion (01..11 or slope)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::tuple<std::string, std::string, std::function<void(Outcome&)>>> criteria{
      {"01", "complex balance", c01},
      {"02", "product-form stationarity", c02},
      {"03", "autocatalytic closed form", c03},
      {"04", "Dirichlet identity", c04},
      {"05", "gap witness", c05},
      {"06", "certificate soundness", c06},
      {"07", "congestion divergence", c07},
      {"08", "mixing consistency", c08},
      {"09", "variance decay", c09},
      {"10", "empirical cross-check", c10},
      {"11", "structural gate", c11},
      {"slope", "mixing bound growth", slope},
  };
  int failures = 0, ran = 0;
  for (const auto& [id, name, fn] : criteria) {
    if (!only.empty() && only != id) continue;
    ++ran;
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.failed += std::string(" [exception: ") + e.what() + "]";
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << id << " " << name << ": " << o.detail.str() << o.failed << std::endl;
    if (!o.pass) ++failures;
  }
  if (ran == 0) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
