#include "ergograph/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace ergograph {

namespace {

Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json species_names(const ReactionNetwork* net, const std::vector<int>& idx) {
  Json out = Json::array();
  for (int i : idx) {
    if (net) out.push_back(net->species[static_cast<std::size_t>(i)]);
    else out.push_back(i);
  }
  return out;
}

Json partition_json(const ReactionNetwork* net, const CatalyticPartition& p) {
  Json layers = Json::array();
  for (const auto& layer : p.layers) layers.push_back(species_names(net, layer));
  Json j;
  j["layers"] = layers;
  j["N"] = p.threshold;
  Json cat = Json::array();
  for (std::size_t i = 0; i < p.layer_of.size(); ++i) {
    if (p.layer_of[i] == 0) continue;
    Json c;
    c["species"] = net ? Json(net->species[i]) : Json(static_cast<int>(i));
    c["birth_catalyst"] = net ? Json(net->species[static_cast<std::size_t>(p.birth_catalyst[i])]) : Json(p.birth_catalyst[i]);
    c["death_catalyst"] = net ? Json(net->species[static_cast<std::size_t>(p.death_catalyst[i])]) : Json(p.death_catalyst[i]);
    cat.push_back(c);
  }
  j["catalysts"] = cat;
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json to_json(const Box& box) { return Json(box.upper()); }

Json to_json(std::span<const int> state) { return Json(std::vector<int>(state.begin(), state.end())); }

Json to_json(const ReactionNetwork& net) {
  Json j;
  j["species"] = net.species;
  Json rs = Json::array();
  for (const auto& r : net.reactions) {
    Json e;
    e["source"] = format_complex(net, r.source);
    e["product"] = format_complex(net, r.product);
    e["kappa"] = r.kappa;
    e["vector"] = reaction_vector(r);
    rs.push_back(e);
  }
  j["reactions"] = rs;
  Json cs = Json::array();
  for (const auto& c : net.complexes()) cs.push_back(format_complex(net, c));
  j["complexes"] = cs;
  Json kin = Json::object();
  for (std::size_t i = 0; i < net.dim(); ++i) kin[net.species[i]] = net.kinetics[i].describe();
  j["kinetics"] = kin;
  return j;
}

Json to_json(const ReactionNetwork& net, const BalanceReport& report) {
  Json j;
  j["balanced"] = report.balanced;
  j["max_abs_residual"] = report.max_abs_residual;
  j["relative_residual"] = report.relative_residual;
  j["max_flux"] = report.max_flux;
  Json per = Json::array();
  for (std::size_t k = 0; k < report.complexes.size(); ++k) {
    Json e;
    e["complex"] = format_complex(net, report.complexes[k]);
    e["inflow"] = report.inflow[k];
    e["outflow"] = report.outflow[k];
    e["residual"] = report.residuals[k];
    per.push_back(e);
  }
  j["complexes"] = per;
  return j;
}

Json to_json(const ReactionNetwork& net, const CatalyticPartition& partition) {
  return partition_json(&net, partition);
}

Json to_json(const WitnessBound& w) {
  Json j;
  j["label"] = w.label;
  j["set_size"] = w.set_size;
  j["mass"] = w.mass;
  j["bound"] = number(w.bound);
  return j;
}

Json to_json(const GapEstimate& gap) {
  Json j;
  j["gap"] = gap.value;
  j["method"] = to_string(gap.method);
  j["residual"] = gap.residual;
  j["box"] = to_json(gap.box);
  Json ws = Json::array();
  for (const auto& w : gap.witness_bounds) ws.push_back(to_json(w));
  j["witnesses"] = ws;
  return j;
}

Json to_json(const PathAudit& a) {
  Json j;
  j["Lbar"] = a.Lbar;
  j["Mbar"] = a.Mbar;
  j["R"] = number(a.R);
  j["cmin"] = number(a.cmin);
  j["states"] = a.states;
  j["terminals"] = a.terminals;
  j["terminal_paths"] = a.terminal_paths;
  return j;
}

Json to_json(const SHistory& s) {
  Json j;
  Json hist = Json::array();
  for (const auto& [box, value] : s.history) hist.push_back(Json::array({to_json(box), number(value)}));
  j["history"] = hist;
  j["relative_increments"] = s.relative_increments;
  j["shrinking"] = s.shrinking;
  j["converged"] = s.converged;
  j["tolerance"] = s.tolerance;
  j["diagnostic"] = s.diagnostic;
  return j;
}

Json to_json(const GapCertificate& c, const ReactionNetwork* net) {
  Json j;
  j["alpha"] = c.alpha;
  j["K"] = c.K;
  if (c.kind == PathFamily::Kind::basic) {
    j["k0_or_partition"] = Json{{"family", "basic"}, {"k0", c.threshold}};
  } else {
    Json p = c.partition ? partition_json(net, *c.partition) : Json();
    p["family"] = "layered";
    p["N_K_alpha"] = c.threshold;
    j["k0_or_partition"] = p;
  }
  j["Lbar"] = c.audit.Lbar;
  j["Mbar"] = c.audit.Mbar;
  j["R"] = number(c.audit.R);
  j["cmin"] = number(c.audit.cmin);
  Json hist = Json::array();
  for (const auto& [box, value] : c.S.history) hist.push_back(Json::array({to_json(box), number(value)}));
  j["S_history"] = hist;
  j["S_relative_increments"] = c.S.relative_increments;
  j["S_converged"] = c.S.converged;
  j["S_used"] = number(c.S_used);
  j["C"] = number(c.C);
  if (c.numeric_gap && c.numeric_box)
    j["consistency"] = Json{{"numeric_gap", *c.numeric_gap}, {"box", to_json(*c.numeric_box)}};
  else
    j["consistency"] = nullptr;
  j["established"] = c.established;
  j["reason"] = c.reason;
  j["terminals"] = c.audit.terminals;
  return j;
}

Json to_json(const CongestionResult& c) {
  Json j;
  j["congestion_ratio"] = number(c.value);
  j["inverse"] = c.value > 0.0 ? number(1.0 / c.value) : Json(nullptr);
  j["edge"] = Json::array({to_json(c.edge_from), to_json(c.edge_to)});
  j["pairs"] = c.pairs;
  return j;
}

Json to_json(const MixingReport& m) {
  Json j;
  j["x0"] = to_json(m.x0);
  j["eps"] = m.eps;
  j["tau_numeric"] = number(m.tau_numeric);
  j["tau_bound"] = number(m.tau_bound);
  j["gap_used"] = m.gap_used;
  j["gap_certified"] = m.gap_certified;
  return j;
}

Json to_json(const DecayCheck& d) {
  Json j;
  j["ok"] = d.ok;
  j["first_violation"] = d.first_violation ? Json(*d.first_violation) : Json(nullptr);
  Json ms = Json::array();
  for (const auto& m : d.margins)
    ms.push_back(Json{{"t", m.t}, {"variance", m.variance}, {"bound", m.bound}, {"margin", m.margin}});
  j["margins"] = ms;
  return j;
}

Json to_json(const EmpiricalComparison& e) {
  Json j;
  j["tv"] = e.tv;
  j["outside_mass"] = e.outside_mass;
  j["window"] = e.window;
  return j;
}

Json to_json(const ResidualReport& r) {
  Json j;
  j["max_interior"] = r.max_interior;
  j["max_overall"] = r.max_overall;
  return j;
}

void write_distribution_csv(std::ostream& os, const Distribution& dist) {
  const std::size_t d = dist.box.dim();
  for (std::size_t i = 0; i < d; ++i) os << 'x' << (i + 1) << ',';
  os << "prob\n";
  State x(d);
  for (std::size_t s = 0; s < dist.box.size(); ++s) {
    dist.box.state(s, x);
    for (int v : x) os << v << ',';
    os << format_double(dist.p[s]) << '\n';
  }
}

void write_tv_curve_csv(std::ostream& os, std::span<const TvPoint> curve) {
  os << "t,tv,bound\n";
  for (const auto& p : curve) os << format_double(p.t) << ',' << format_double(p.tv) << ',' << format_double(p.bound) << '\n';
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, std::span<const std::string> species) {
  os << 't';
  for (const auto& s : species) os << ',' << s;
  os << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << format_double(traj.times[k]);
    for (std::size_t i = 0; i < traj.dim; ++i) os << ',' << traj.states[k * traj.dim + i];
    os << '\n';
  }
}

void write_chain_coo(std::ostream& os, const TruncatedChain& chain) {
  os << "from,to,rate\n";
  for (std::size_t s = 0; s < chain.size(); ++s)
    for (const auto& t : chain.row(s))
      os << chain.box_index(s) << ',' << chain.box_index(t.target) << ',' << format_double(t.rate) << '\n';
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ergograph
