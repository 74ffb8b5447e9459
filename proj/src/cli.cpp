#include "ergograph/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "ergograph/parallel.hpp"

#ifndef ERGOGRAPH_VERSION
#define ERGOGRAPH_VERSION "0.0.0"
#endif

namespace ergograph::cli {

namespace {

constexpr const char* kFactorNote =
    "decay rates use the conservative convention: Var(P_t f) <= e^{-2Ct} Var(f) and TV <= (2/pi(x)) e^{-Ct}";

// Thrown for "conditions not satisfied" outcomes that still produce a report.
struct Inapplicable {
  std::string reason;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open network file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Box require_box(const RunConfig& cfg, const ReactionNetwork& net) {
  if (!cfg.box) throw Error("--box is required for '" + cfg.command + "'");
  Box b(*cfg.box);
  if (b.dim() != net.dim())
    throw Error("box has " + std::to_string(b.dim()) + " coordinates but the network has " +
                std::to_string(net.dim()) + " species");
  return b;
}

// Halving sequence ending at the requested box.
std::vector<Box> box_schedule(const Box& top, int levels) {
  std::vector<Box> out;
  std::vector<int> caps = top.upper();
  for (int k = 0; k < std::max(1, levels); ++k) {
    out.insert(out.begin(), Box(caps));
    bool shrunk = false;
    for (int& v : caps) {
      int h = v / 2;
      if (h < v && h >= 1) shrunk = true;
      v = std::max(1, h);
    }
    if (!shrunk) break;
  }
  return out;
}

// Stationary law on the lattice when one is known in closed form.
struct Law {
  std::unique_ptr<PiRule> rule;
  std::string source;  // "product-form", "autocatalytic"
  std::optional<std::vector<double>> c;
  std::optional<AutocatalyticParams> autocatalytic;
};

Law resolve_law(const ReactionNetwork& net, const RunConfig& cfg, std::vector<std::string>& warnings) {
  Law law;
  if (auto p = match_autocatalytic(net)) {
    law.rule = std::make_unique<AutocatalyticRule>(*p);
    law.source = "autocatalytic";
    law.autocatalytic = p;
    return law;
  }
  std::optional<std::vector<double>> c;
  if (cfg.c) {
    if (cfg.c->size() != net.dim()) throw Error("--c needs one value per species");
    auto rep = verify_complex_balanced(net, *cfg.c);
    if (rep.balanced) c = *cfg.c;
    else warnings.push_back("supplied c is not complex balanced (relative residual " +
                            format_double(rep.relative_residual) + ")");
  } else {
    std::vector<double> ones(net.dim(), 1.0);
    c = search_complex_balanced(net, ones);
    if (c && !verify_complex_balanced(net, *c, 1e-9).balanced) c.reset();
  }
  if (c) {
    law.rule = std::make_unique<ProductFormRule>(net.kinetics, *c);
    law.source = "product-form";
    law.c = c;
  }
  return law;
}

std::optional<TailDecay> decay_for(const ReactionNetwork& net, const Law& law, const RunConfig& cfg) {
  std::vector<double> alphas(std::begin(kDefaultAlphas), std::end(kDefaultAlphas));
  if (cfg.alpha) alphas = {*cfg.alpha};
  std::optional<TailDecay> td;
  if (law.autocatalytic) {
    const auto& p = *law.autocatalytic;
    std::vector<double> b(2, (p.kappa1 + p.kappa2) / p.delta);
    td = tail_decay_from_ratio_bounds(b, alphas);
  } else if (law.c) {
    td = tail_decay_parameters(net, *law.c, alphas);
  }
  if (td && cfg.K) td->K = *cfg.K;
  return td;
}

PathFamily make_family(const ReactionNetwork& net, const CatalyticPartition& part, const TailDecay& td,
                       const RunConfig& cfg) {
  std::string kind = cfg.family;
  if (kind == "auto") kind = part.layers.size() == 1 ? "basic" : "layered";
  if (kind == "basic") {
    if (part.layers.size() != 1) throw Inapplicable{"basic family needs every species in layer 0"};
    if (cfg.k0) return PathFamily::basic_with_threshold(net.dim(), td.alpha, td.K, *cfg.k0);
    return PathFamily::basic(net.dim(), td.alpha, td.K);
  }
  if (kind == "layered") return PathFamily::layered(td.alpha, td.K, part);
  throw Error("unknown path family '" + cfg.family + "'");
}

// Chain on the box, restricted to the closed class of the origin when reducible.
TruncatedChain chain_for(const ReactionNetwork& net, const Box& box, std::vector<std::string>& warnings) {
  auto chain = build_truncated_chain(net, box);
  if (is_irreducible(chain)) return chain;
  State origin(box.dim(), 0);
  auto r = restrict_to_closed_class(chain, origin);
  warnings.push_back("truncated chain is reducible; restricted to the closed class of the origin (" +
                     std::to_string(r.size()) + " of " + std::to_string(chain.size()) + " states)");
  return r;
}

State start_state(const RunConfig& cfg, const Box& box) {
  if (cfg.x0) {
    if (cfg.x0->size() != box.dim()) throw Error("--x0 needs one value per species");
    if (!box.contains(*cfg.x0)) throw Error("--x0 lies outside the box");
    return *cfg.x0;
  }
  State x(box.dim());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::min(10, box.upper()[i]);
  return x;
}

Json config_json(const RunConfig& cfg) {
  Json j;
  j["network"] = cfg.network_path;
  if (cfg.box) j["box"] = *cfg.box;
  if (cfg.alpha) j["alpha"] = *cfg.alpha;
  if (cfg.K) j["K"] = *cfg.K;
  if (cfg.k0) j["k0"] = *cfg.k0;
  if (cfg.command == "certify" || cfg.command == "congestion" || cfg.command == "gap") j["family"] = cfg.family;
  if (cfg.c) j["c"] = *cfg.c;
  if (cfg.command == "mixing") {
    j["eps"] = cfg.eps;
    j["certify"] = cfg.certify;
  }
  if (cfg.horizon) j["t"] = *cfg.horizon;
  if (cfg.command == "simulate") {
    j["seed"] = cfg.seed;
    j["burnin"] = cfg.burnin;
  }
  if (cfg.x0) j["x0"] = *cfg.x0;
  if (!cfg.set.empty()) j["set"] = cfg.set;
  if (cfg.n) j["n"] = *cfg.n;
  if (!cfg.times.empty()) j["times"] = cfg.times;
  if (cfg.command == "certify" || cfg.command == "gap" || cfg.command == "mixing") {
    j["levels"] = cfg.levels;
    j["s_tolerance"] = cfg.s_tolerance;
  }
  return j;
}

// ---- commands ----

void cmd_parse(const ReactionNetwork& net, Report& rep) {
  rep.results = to_json(net);
  rep.results["formatted"] = format_network(net);
}

void cmd_check(const ReactionNetwork& net, const RunConfig& cfg, Report& rep) {
  Law law = resolve_law(net, cfg, rep.warnings);
  auto part = derive_catalytic_partition(net);
  Json& r = rep.results;
  r["partition"] = part ? to_json(net, *part) : Json(nullptr);
  r["stationary_law"] = law.rule ? Json(law.source) : Json(nullptr);
  r["c"] = law.c ? Json(*law.c) : Json(nullptr);
  auto td = decay_for(net, law, cfg);
  r["tail_decay"] = td ? Json{{"alpha", td->alpha}, {"K", td->K}} : Json(nullptr);
  std::string reason;
  if (!part) reason = partition_failure_reason(net);
  else if (!law.rule) reason = "no complex-balanced equilibrium or closed-form law found (the search proves nothing)";
  else if (!td) reason = "no tail decay exponent among the tried alphas";
  r["covered"] = reason.empty();
  r["reason"] = reason;
  if (!reason.empty()) throw Inapplicable{reason};
}

void cmd_balance(const ReactionNetwork& net, const RunConfig& cfg, Report& rep) {
  std::vector<double> c;
  if (cfg.c) {
    if (cfg.c->size() != net.dim()) throw Error("--c needs one value per species");
    c = *cfg.c;
    rep.results["searched"] = false;
  } else {
    auto found = search_complex_balanced(net, std::vector<double>(net.dim(), 1.0));
    rep.results["searched"] = true;
    if (!found) {
      rep.results["c"] = nullptr;
      throw Inapplicable{"no complex-balanced equilibrium found by the search (this proves nothing)"};
    }
    c = *found;
  }
  auto report = verify_complex_balanced(net, c);
  rep.results["c"] = c;
  rep.results["balance"] = to_json(net, report);
  if (!report.balanced) throw Inapplicable{"c is not complex balanced"};
}

void cmd_stationary(const ReactionNetwork& net, const RunConfig& cfg, Report& rep) {
  const Box box = require_box(cfg, net);
  auto chain = chain_for(net, box, rep.warnings);
  auto pi = solve_stationary_truncated(chain);
  auto resid = stationarity_residual(pi, chain);
  Json& r = rep.results;
  r["box"] = to_json(box);
  r["states"] = chain.size();
  r["residual"] = to_json(resid);
  double face = 0.0;
  State x(box.dim());
  for (std::size_t s = 0; s < box.size(); ++s) {
    box.state(s, x);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] == box.upper()[i]) {
        face += pi.p[s];
        break;
      }
  }
  r["upper_face_mass"] = face;
  Law law = resolve_law(net, cfg, rep.warnings);
  if (law.rule) {
    Distribution formula = law.rule->on_box(box);
    const double inside = formula.total();
    formula = formula.renormalized();
    Json f;
    f["law"] = law.source;
    if (law.c) f["c"] = *law.c;
    f["tv_to_solved"] = tv_distance(formula, pi);
    f["residual"] = to_json(stationarity_residual(formula, chain));
    f["outside_mass"] = std::max(0.0, 1.0 - inside);
    r["closed_form"] = f;
  } else {
    r["closed_form"] = nullptr;
  }
  rep.distribution = pi;
}

std::vector<WitnessBound> default_witnesses(const Distribution& pi, const TruncatedChain& chain) {
  std::vector<WitnessBound> out;
  const Box& box = chain.box();
  State x(box.dim());
  for (std::size_t i = 0; i < box.dim(); ++i) {
    std::vector<double> coord(box.size());
    for (std::size_t s = 0; s < box.size(); ++s) {
      box.state(s, x);
      coord[s] = x[i];
    }
    const int cut = static_cast<int>(std::floor(expectation(pi, coord)));
    std::vector<std::size_t> set;
    for (std::size_t s = 0; s < chain.size(); ++s) {
      box.state(chain.box_index(s), x);
      if (x[i] <= cut) set.push_back(chain.box_index(s));
    }
    WitnessBound w;
    w.label = "x" + std::to_string(i + 1) + " <= " + std::to_string(cut);
    w.set_size = set.size();
    for (std::size_t b : set) w.mass += pi.p[b];
    if (w.mass <= 0.0 || w.mass >= 1.0) continue;
    w.bound = witness_upper_bound(pi, chain, set);
    out.push_back(w);
  }
  return out;
}

struct CertifyOutcome {
  std::optional<GapCertificate> cert;
  std::string reason;
};

CertifyOutcome try_certify(const ReactionNetwork& net, const Law& law, const RunConfig& cfg, const Box& box) {
  auto part = derive_catalytic_partition(net);
  if (!part) return {std::nullopt, partition_failure_reason(net)};
  if (!law.rule) return {std::nullopt, "no complex-balanced equilibrium or closed-form law found"};
  auto td = decay_for(net, law, cfg);
  if (!td) return {std::nullopt, "no tail decay exponent among the tried alphas"};
  PathFamily pf = make_family(net, *part, *td, cfg);
  // Boxes below threshold + step hold no lowered terminals and only add noise to the history.
  std::vector<Box> boxes;
  for (const auto& b : box_schedule(box, cfg.levels)) {
    const int low = *std::min_element(b.upper().begin(), b.upper().end());
    if (low >= pf.threshold() + pf.step() || b == box) boxes.push_back(b);
  }
  auto cert = certify_gap(pf, net, *law.rule, boxes, cfg.s_tolerance);
  return {cert, cert.reason};
}

void cmd_gap(const ReactionNetwork& net, const RunConfig& cfg, Report& rep) {
  const Box box = require_box(cfg, net);
  auto chain = chain_for(net, box, rep.warnings);
  auto pi = solve_stationary_truncated(chain);
  auto gap = estimate_gap(pi, chain);
  gap.witness_bounds = default_witnesses(pi, chain);
  Json& r = rep.results;
  Json g = to_json(gap);
  r["gap"] = g["gap"];
  r["method"] = g["method"];
  r["residual"] = g["residual"];
  r["box"] = g["box"];
  Law law = resolve_law(net, cfg, rep.warnings);
  try {
    auto out = try_certify(net, law, cfg, box);
    if (out.cert) {
      out.cert->numeric_gap = gap.value;
      out.cert->numeric_box = box;
      r["certificate"] = to_json(*out.cert, &net);
      if (out.cert->established && !out.cert->S.converged) rep.warnings.push_back("S not converged: " + out.cert->S.diagnostic);
    } else {
      r["certificate"] = Json{{"established", false}, {"reason", out.reason}};
    }
  } catch (const InactivePathError& e) {
    r["certificate"] = Json{{"established", false}, {"reason", e.what()}};
  } catch (const Inapplicable& e) {
    r["certificate"] = Json{{"established", false}, {"reason", e.reason}};
  }
  r["witnesses"] = g["witnesses"];
}

void cmd_witness(const ReactionNetwork& net, const RunConfig& cfg, Report& rep) {
  std::vector<std::vector<int>> set = cfg.set;
  if (set.empty() && cfg.n) {
    if (net.dim() != 2) throw Error("--n builds the set {(n,0),(n+1,1)} and needs two species");
    set = {{*cfg.n, 0}, {*cfg.n + 1, 1}};
  }
  if (set.empty()) throw Error("witness needs --set or --n");
  std::vector<int> caps;
  if (cfg.box) {
    caps = *cfg.box;
  } else {
    caps.assign(net.dim(), 1);
    for (const auto& x : set)
      for (std::size_t i = 0; i < x.size() && i < caps.size(); ++i) caps[i] = std::max(caps[i], x[i] + 2);
    for (int& v : caps) v = std::max(v, *std::max_element(caps.begin(), caps.end()));
  }
  Box box(caps);
  if (box.dim() != net.dim()) throw Error("box dimension does not match the network");
  auto chain = chain_for(net, box, rep.warnings);
  auto pi = solve_stationary_truncated(chain);
  std::vector<std::size_t> idx;
  Json states = Json::array();
  for (const auto& x : set) {
    if (x.size() != box.dim() || !box.contains(x)) throw Error("witness state " + format_state(x) + " is outside the box");
    if (!chain.chain_index(box.index(x))) throw Error("witness state " + format_state(x) + " is not in the closed class");
    idx.push_back(box.index(x));
    states.push_back(x);
  }
  double mass = 0.0;
  for (std::size_t b : idx) mass += pi.p[b];
  const double q = witness_upper_bound(pi, chain, idx);
  Json& r = rep.results;
  r["set"] = states;
  r["box"] = to_json(box);
  r["mass"] = mass;
  r["quotient"] = q;
  r["note"] = "upper bound on the spectral gap of the truncated chain, not a verdict on ergodicity";
}

void cmd_certify(const ReactionNetwork& net, const RunConfig& cfg, Report& rep) {
  const Box box = require_box(cfg, net);
  Law law = resolve_law(net, cfg, rep.warnings);
  auto out = try_certify(net, law, cfg, box);
  if (!out.cert) throw Inapplicable{out.reason};
  GapCertificate& cert = *out.cert;
  // The numeric gap needs pi > 0 in double precision; halve the box until it is.
  std::vector<int> caps = box.upper();
  for (int attempt = 0; attempt < 12; ++attempt) {
    try {
      std::vector<std::string> ignored;
      auto chain = chain_for(net, Box(caps), ignored);
      auto pi = solve_stationary_truncated(chain);
      cert.numeric_gap = estimate_gap(pi, chain).value;
      cert.numeric_box = Box(caps);
      break;
    } catch (const std::exception& e) {
      bool shrunk = false;
      for (int& v : caps)
        if (v > 1) v /= 2, shrunk = true;
      if (!shrunk || attempt == 11) {
        rep.warnings.push_back(std::string("numeric gap unavailable: ") + e.what());
        break;
      }
    }
  }
  if (cert.numeric_box && !(*cert.numeric_box == box))
    rep.warnings.push_back("numeric gap computed on the smaller box " + cert.numeric_box->describe() +
                           " where pi is representable");
  rep.results = to_json(cert, &net);
  rep.results["stationary_law"] = law.source;
  rep.warnings.push_back(kFactorNote);
  if (cert.established && !cert.S.converged) rep.warnings.push_back("S not converged: " + cert.S.diagnostic);
  if (cert.established && cert.numeric_gap && cert.C > *cert.numeric_gap + 1e-6)
    rep.warnings.push_back("certificate constant exceeds the numeric gap of the truncation");
  if (!cert.established) throw Inapplicable{"certificate not established: " + cert.reason};
}

void cmd_congestion(const ReactionNetwork& net, const RunConfig& cfg, Report& rep) {
  const Box box = require_box(cfg, net);
  auto chain = build_truncated_chain(net, box);
  if (!is_irreducible(chain)) throw Inapplicable{"truncated chain is reducible"};
  auto pi = solve_stationary_truncated(chain);
  std::optional<PathFamily> family;
  if (cfg.family != "monotone") {
    Law law = resolve_law(net, cfg, rep.warnings);
    auto part = derive_catalytic_partition(net);
    if (!part) throw Inapplicable{partition_failure_reason(net)};
    auto td = decay_for(net, law, cfg);
    if (!td) throw Inapplicable{"no tail decay parameters for the composed family"};
    family = make_family(net, *part, *td, cfg);
  }
  auto res = congestion_ratio(pi, chain, family ? &*family : nullptr);
  rep.results = to_json(res);
  rep.results["family"] = family ? (family->kind() == PathFamily::Kind::basic ? "basic" : "layered") : "monotone";
  rep.results["box"] = to_json(box);
  const double gap = estimate_gap(pi, chain).value;
  rep.results["numeric_gap"] = gap;
  rep.results["inverse_below_gap"] = res.value > 0.0 && 1.0 / res.value <= gap + 1e-9;
}

void cmd_mixing(const ReactionNetwork& net, const RunConfig& cfg, Report& rep) {
  const Box box = require_box(cfg, net);
  if (!(cfg.eps > 0.0 && cfg.eps < 0.5)) throw Error("--eps must lie in (0, 1/2)");
  auto chain = chain_for(net, box, rep.warnings);
  auto pi = solve_stationary_truncated(chain);
  const State x0 = start_state(cfg, box);
  MixingReport m;
  m.x0 = x0;
  m.eps = cfg.eps;
  m.gap_used = estimate_gap(pi, chain).value;
  if (cfg.certify) {
    Law law = resolve_law(net, cfg, rep.warnings);
    auto out = try_certify(net, law, cfg, box);
    if (out.cert && out.cert->established && out.cert->C <= m.gap_used + 1e-6) {
      m.gap_used = out.cert->C;
      m.gap_certified = true;
      if (!out.cert->S.converged) rep.warnings.push_back("S not converged: " + out.cert->S.diagnostic);
    } else {
      rep.warnings.push_back("certificate unavailable (" + out.reason + "); using the numeric gap of the truncation");
    }
  } else {
    rep.warnings.push_back("tau_bound uses the numeric gap of the truncation, not a certified constant");
  }
  MixingOptions opt;
  if (cfg.horizon) opt.horizon = *cfg.horizon;
  m.tau_numeric = mixing_time_numeric(chain, pi, x0, cfg.eps, opt);
  m.tau_bound = mixing_bound_from_certificate(m.gap_used, pi.at(x0), cfg.eps);
  rep.results = to_json(m);
  rep.results["box"] = to_json(box);
  rep.results["pi_x0"] = pi.at(x0);
  std::vector<double> times = cfg.times;
  if (times.empty()) {
    const double end = std::max(1.0, 2.0 * m.tau_numeric);
    for (int k = 0; k <= 40; ++k) times.push_back(end * k / 40.0);
  }
  rep.curve = tv_curve(chain, pi, x0, times, m.gap_used);
  Json curve = Json::array();
  for (const auto& p : rep.curve) curve.push_back(Json{{"t", p.t}, {"tv", p.tv}, {"bound", p.bound}});
  rep.results["tv_curve"] = curve;
  rep.warnings.push_back(kFactorNote);
}

void cmd_simulate(const ReactionNetwork& net, const RunConfig& cfg, Report& rep) {
  const double horizon = cfg.horizon.value_or(1000.0);
  if (!(horizon > 0.0)) throw Error("--t must be positive");
  State x0 = cfg.x0 ? *cfg.x0 : State(net.dim(), 0);
  if (x0.size() != net.dim()) throw Error("--x0 needs one value per species");
  const double burnin = cfg.burnin < 0.0 ? 0.1 * horizon : cfg.burnin;
  auto traj = ssa_simulate(net, x0, horizon, cfg.seed);
  Json& r = rep.results;
  r["jumps"] = traj.size() - 1;
  r["final_state"] = traj.state(traj.size() - 1);
  auto occ = occupancy(traj, burnin);
  std::vector<double> mean(net.dim(), 0.0);
  double total = 0.0;
  for (const auto& [x, w] : occ) {
    total += w;
    for (std::size_t i = 0; i < x.size(); ++i) mean[i] += w * x[i];
  }
  for (double& v : mean) v /= total;
  r["time_average"] = mean;
  r["burnin"] = burnin;
  if (cfg.box) {
    const Box box = require_box(cfg, net);
    Law law = resolve_law(net, cfg, rep.warnings);
    Distribution pi;
    if (law.rule) {
      pi = law.rule->on_box(box).renormalized();
      r["reference"] = law.source;
    } else {
      std::vector<std::string> ignored;
      pi = solve_stationary_truncated(chain_for(net, box, ignored));
      r["reference"] = "truncated solve";
    }
    r["empirical"] = to_json(empirical_vs_stationary(traj, pi, burnin));
  }
  rep.trajectory = std::move(traj);
  rep.species = net.species;
}

}  // namespace

std::string version() { return ERGOGRAPH_VERSION; }

Report run(const RunConfig& cfg) {
  Report rep;
  rep.command = cfg.command;
  rep.version = version();
  const std::string text = read_file(cfg.network_path);
  const std::string opts = config_json(cfg).dump();
  rep.inputs = config_json(cfg);
  rep.inputs["digest"] = hex_digest(fnv1a(opts, fnv1a(text)));
  set_thread_limit(cfg.threads);

  ReactionNetwork net = parse_network(text);
  try {
    const std::string& c = cfg.command;
    if (c == "parse") cmd_parse(net, rep);
    else if (c == "check") cmd_check(net, cfg, rep);
    else if (c == "balance") cmd_balance(net, cfg, rep);
    else if (c == "stationary") cmd_stationary(net, cfg, rep);
    else if (c == "gap") cmd_gap(net, cfg, rep);
    else if (c == "witness") cmd_witness(net, cfg, rep);
    else if (c == "certify") cmd_certify(net, cfg, rep);
    else if (c == "congestion") cmd_congestion(net, cfg, rep);
    else if (c == "mixing") cmd_mixing(net, cfg, rep);
    else if (c == "simulate") cmd_simulate(net, cfg, rep);
    else throw Error("unknown command '" + c + "'");
  } catch (const Inapplicable& e) {
    rep.exit_code = 2;
    rep.results["reason"] = e.reason;
  } catch (const InactivePathError& e) {
    rep.exit_code = 2;
    rep.results["reason"] = e.what();
    rep.results["inactive_edge"] = Json::array({to_json(e.from()), to_json(e.to())});
  }
  return rep;
}

std::string render_report(const Report& rep, const std::string& format) {
  if (format == "json") {
    Json j;
    j["command"] = rep.command;
    j["inputs"] = rep.inputs;
    j["results"] = rep.results;
    j["warnings"] = rep.warnings;
    j["version"] = rep.version;
    return j.dump(2) + "\n";
  }
  if (format == "csv") {
    std::ostringstream os;
    if (rep.distribution) write_distribution_csv(os, *rep.distribution);
    else if (!rep.curve.empty()) write_tv_curve_csv(os, rep.curve);
    else if (rep.trajectory) write_trajectory_csv(os, *rep.trajectory, rep.species);
    else throw Error("command '" + rep.command + "' has no tabular result for CSV output");
    return os.str();
  }
  throw Error("unsupported format '" + format + "'");
}

namespace {

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::string s = text;
  if (!s.empty() && s.front() == '[') s.erase(0, 1);
  if (!s.empty() && s.back() == ']') s.pop_back();
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof()) throw Error(std::string("cannot read ") + what + " from '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error(std::string("empty ") + what);
  return out;
}

}  // namespace

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral gap certificates and mixing diagnostics for stochastic reaction networks"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  RunConfig cfg;
  std::string box, c, x0, set, times;
  unsigned threads = 0;

  struct Spec {
    const char* name;
    const char* help;
    unsigned flags;
  };
  enum : unsigned { kBox = 1, kDecay = 2, kC = 4, kMix = 8, kSim = 16, kWit = 32, kCert = 64 };
  const Spec specs[] = {
      {"parse", "Parse a network file and echo its normalized form", 0},
      {"check", "Structural conditions: catalytic partition, balanced law, tail decay", kC | kDecay},
      {"balance", "Verify or search a complex-balanced equilibrium", kC},
      {"stationary", "Stationary distribution on a box", kBox | kC},
      {"gap", "Numeric spectral gap with certificate and witnesses", kBox | kC | kDecay | kCert},
      {"witness", "Rayleigh quotient of a normalized indicator", kBox | kWit},
      {"certify", "Path-method lower bound on the spectral gap", kBox | kC | kDecay | kCert},
      {"congestion", "Canonical-path congestion ratio", kBox | kC | kDecay},
      {"mixing", "Numeric mixing time and bound", kBox | kC | kDecay | kMix | kCert},
      {"simulate", "Gillespie simulation with occupancy comparison", kBox | kC | kSim},
  };
  for (const auto& sp : specs) {
    auto* sub = app.add_subcommand(sp.name, sp.help);
    sub->add_option("network", cfg.network_path, "Reaction network file")->required();
    sub->add_option("-o,--output", cfg.output, "Write the report to a file");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--threads", threads, "Worker thread cap (default: ERGOGRAPH_THREADS or 1)");
    if (sp.flags & kBox) sub->add_option("--box", box, "Box upper corner, e.g. 25,25");
    if (sp.flags & kC) sub->add_option("--c", c, "Complex-balanced equilibrium, e.g. 1,1");
    if (sp.flags & kDecay) {
      sub->add_option("--alpha", cfg.alpha, "Tail decay exponent");
      sub->add_option("--K", cfg.K, "Tail decay threshold");
      sub->add_option("--k0", cfg.k0, "Explicit threshold of the basic path family");
      sub->add_option("--family", cfg.family, "auto, basic, layered (congestion also: monotone)");
    }
    if (sp.flags & kCert) {
      sub->add_option("--levels", cfg.levels, "Number of boxes in the S history (halving)");
      sub->add_option("--s-tol", cfg.s_tolerance, "Relative tolerance on S increments");
    }
    if (sp.flags & kMix) {
      sub->add_option("--eps", cfg.eps, "Total-variation level in (0, 1/2)");
      sub->add_option("--times", times, "Sample times for the TV curve, e.g. 0,0.5,1");
      sub->add_flag("--certify", cfg.certify, "Use a path-method certificate for the bound");
    }
    if (sp.flags & (kMix | kSim)) {
      sub->add_option("--x0", x0, "Initial state");
      sub->add_option("--t", cfg.horizon, "Time horizon");
    }
    if (sp.flags & kSim) {
      sub->add_option("--seed", cfg.seed, "Random seed");
      sub->add_option("--burnin", cfg.burnin, "Burn-in time (default: a tenth of the horizon)");
    }
    if (sp.flags & kWit) {
      sub->add_option("--set", set, "States separated by ';', e.g. 9,0;10,1");
      sub->add_option("--n", cfg.n, "Use the set {(n,0),(n+1,1)}");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? version() + "\n" : app.help());
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (!box.empty()) cfg.box = parse_list<int>(box, "box");
    if (!c.empty()) cfg.c = parse_list<double>(c, "c");
    if (!x0.empty()) cfg.x0 = parse_list<int>(x0, "x0");
    if (!times.empty()) cfg.times = parse_list<double>(times, "times");
    if (!set.empty()) {
      std::stringstream ss(set);
      std::string item;
      while (std::getline(ss, item, ';'))
        if (!item.empty()) cfg.set.push_back(parse_list<int>(item, "set state"));
    }
    if (threads == 0) {
      const char* env = std::getenv("ERGOGRAPH_THREADS");
      threads = env ? static_cast<unsigned>(std::max(1, std::atoi(env))) : 1u;
    }
    cfg.threads = threads;

    Report rep = run(cfg);
    const std::string text = render_report(rep, cfg.format);
    if (cfg.output.empty()) {
      out << text;
    } else {
      std::ofstream f(cfg.output, std::ios::binary);
      if (!f) throw Error("cannot write '" + cfg.output + "'");
      f << text;
    }
    for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
    if (rep.exit_code == 2) err << "conditions not satisfied: " << rep.results.value("reason", std::string()) << "\n";
    return rep.exit_code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ergograph::cli
