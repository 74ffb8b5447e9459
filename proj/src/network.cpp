#include "ergograph/network.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ergograph {

std::string format_state(const State& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(x[i]);
  }
  return s + ")";
}

bool Complex::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](int v) { return v == 0; });
}

int Complex::order() const {
  int s = 0;
  for (int v : coeffs) s += v;
  return s;
}

ThetaRule ThetaRule::mass_action() { return ThetaRule(); }

ThetaRule ThetaRule::power(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error("power kinetics needs a positive exponent");
  ThetaRule t;
  t.kind_ = Kind::power;
  t.beta_ = beta;
  return t;
}

ThetaRule ThetaRule::poly(std::vector<double> coeffs) {
  if (coeffs.empty()) throw Error("poly kinetics needs at least one coefficient");
  if (!(coeffs[0] > 0.0)) throw Error("poly kinetics needs a positive linear coefficient");
  for (double v : coeffs)
    if (v < 0.0 || !std::isfinite(v)) throw Error("poly kinetics coefficients must be non-negative");
  while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
  ThetaRule t;
  t.kind_ = Kind::falling_factorial_poly;
  t.coeffs_ = std::move(coeffs);
  return t;
}

double ThetaRule::operator()(long n) const {
  if (n <= 0) return 0.0;
  switch (kind_) {
    case Kind::mass_action:
      return static_cast<double>(n);
    case Kind::power:
      return std::pow(static_cast<double>(n), beta_);
    case Kind::falling_factorial_poly: {
      double ff = 1.0, total = 0.0;
      for (std::size_t j = 0; j < coeffs_.size(); ++j) {
        ff *= static_cast<double>(n - static_cast<long>(j));
        if (ff == 0.0) break;
        total += coeffs_[j] * ff;
      }
      return total;
    }
  }
  return 0.0;
}

static std::string fmt_double(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string ThetaRule::describe() const {
  switch (kind_) {
    case Kind::mass_action:
      return "massaction";
    case Kind::power:
      return "power " + fmt_double(beta_);
    case Kind::falling_factorial_poly: {
      std::string s = "poly ";
      for (std::size_t j = 0; j < coeffs_.size(); ++j) {
        if (j) s += ",";
        s += fmt_double(coeffs_[j]);
      }
      return s;
    }
  }
  return {};
}

std::vector<Complex> ReactionNetwork::complexes() const {
  std::vector<Complex> out;
  auto add = [&](const Complex& y) {
    if (std::find(out.begin(), out.end(), y) == out.end()) out.push_back(y);
  };
  for (const auto& r : reactions) {
    add(r.source);
    add(r.product);
  }
  return out;
}

int ReactionNetwork::species_index(std::string_view name) const {
  for (std::size_t i = 0; i < species.size(); ++i)
    if (species[i] == name) return static_cast<int>(i);
  return -1;
}

bool ReactionNetwork::all_mass_action() const {
  return std::all_of(kinetics.begin(), kinetics.end(),
                     [](const ThetaRule& t) { return t.kind() == ThetaRule::Kind::mass_action; });
}

std::vector<int> reaction_vector(const Reaction& r) {
  std::vector<int> v(r.source.coeffs.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = r.product.coeffs[i] - r.source.coeffs[i];
  return v;
}

double monomial(std::span<const double> c, const Complex& y) {
  double m = 1.0;
  for (std::size_t i = 0; i < y.coeffs.size(); ++i)
    if (y.coeffs[i]) m *= std::pow(c[i], y.coeffs[i]);
  return m;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

using Terms = std::vector<std::pair<int, int>>;  // (species index, coefficient)

struct RawReaction {
  Terms source, product;
  double kappa;
  int line;
};

bool is_name_start(char ch) { return std::isalpha(static_cast<unsigned char>(ch)) || ch == '_'; }
bool is_name_char(char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; }

class LineParser {
 public:
  LineParser(std::string_view text, int line, std::vector<std::string>& species)
      : text_(text), line_(line), species_(species) {}

  [[noreturn]] void fail(const std::string& what, std::size_t pos) const {
    throw ParseError(what, line_, static_cast<int>(pos) + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  bool consume(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  std::size_t pos() const { return pos_; }

  std::string name() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= text_.size() || !is_name_start(text_[pos_])) fail("expected a species name", pos_);
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ' ' && text_[pos_] != '\t' &&
           text_[pos_] != '\r')
      ++pos_;
    if (start == pos_) fail("expected a number", start);
    double v = 0.0;
    auto tok = text_.substr(start, pos_ - start);
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v))
      fail("malformed number '" + std::string(tok) + "'", start);
    return v;
  }

  int species_id(const std::string& nm) {
    for (std::size_t i = 0; i < species_.size(); ++i)
      if (species_[i] == nm) return static_cast<int>(i);
    species_.push_back(nm);
    return static_cast<int>(species_.size()) - 1;
  }

  Terms complex() {
    skip_ws();
    Terms terms;
    if (pos_ < text_.size() && text_[pos_] == '0') {
      std::size_t after = pos_ + 1;
      if (after >= text_.size() || !std::isalnum(static_cast<unsigned char>(text_[after]))) {
        ++pos_;
        return terms;
      }
    }
    while (true) {
      skip_ws();
      std::size_t start = pos_;
      int coeff = 1;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        coeff = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          coeff = coeff * 10 + (text_[pos_] - '0');
          if (coeff > 1000000) fail("stoichiometric coefficient too large", start);
          ++pos_;
        }
        if (coeff == 0) fail("stoichiometric coefficient must be positive", start);
      }
      int id = species_id(name());
      auto it = std::find_if(terms.begin(), terms.end(), [&](auto& t) { return t.first == id; });
      if (it == terms.end())
        terms.emplace_back(id, coeff);
      else
        it->second += coeff;
      if (!consume("+")) break;
    }
    return terms;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  std::vector<std::string>& species_;
};

Complex to_complex(const Terms& terms, std::size_t dim) {
  Complex y;
  y.coeffs.assign(dim, 0);
  for (auto [i, c] : terms) y.coeffs[i] += c;
  return y;
}

}  // namespace

ReactionNetwork parse_network(std::string_view text) {
  std::vector<std::string> species;
  std::vector<RawReaction> raw;
  struct RawTheta {
    std::string name;
    ThetaRule rule;
    int line, col;
  };
  std::vector<RawTheta> thetas;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;

    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    LineParser p(line, line_no, species);
    if (p.at_end()) {
      if (end == text.size()) break;
      continue;
    }

    std::size_t first = line.find_first_not_of(" \t");
    if (line.substr(first, 6) == "theta " || line.substr(first, 6) == "theta\t") {
      p.consume("theta");
      std::size_t name_pos = p.pos();
      std::string nm = p.name();
      if (!p.consume(":")) p.fail("expected ':' after species name", p.pos());
      std::size_t kind_pos = p.pos();
      std::optional<ThetaRule> rule;
      try {
        if (p.consume("massaction")) {
          rule = ThetaRule::mass_action();
        } else if (p.consume("power")) {
          rule = ThetaRule::power(p.number());
        } else if (p.consume("poly")) {
          std::vector<double> cs{p.number()};
          while (p.consume(",")) cs.push_back(p.number());
          rule = ThetaRule::poly(std::move(cs));
        } else {
          p.fail("expected massaction, power or poly", kind_pos);
        }
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        p.fail(e.what(), kind_pos);
      }
      if (!p.at_end()) p.fail("unexpected trailing text", p.pos());
      thetas.push_back({nm, *rule, line_no, static_cast<int>(name_pos) + 1});
      if (end == text.size()) break;
      continue;
    }

    RawReaction r{};
    r.line = line_no;
    r.source = p.complex();
    bool reversible = false;
    std::size_t arrow_pos = p.pos();
    if (p.consume("<->"))
      reversible = true;
    else if (!p.consume("->"))
      p.fail("expected '->' or '<->'", arrow_pos);
    r.product = p.complex();
    if (!p.consume(":")) p.fail("expected ':' before rate constant", p.pos());
    std::size_t kpos = p.pos();
    r.kappa = p.number();
    if (!(r.kappa > 0.0)) p.fail("rate constant must be positive", kpos);
    double back = 0.0;
    std::size_t bpos = 0;
    if (reversible) {
      if (!p.consume(",")) p.fail("reversible reaction needs two rate constants", p.pos());
      bpos = p.pos();
      back = p.number();
      if (!(back > 0.0)) p.fail("rate constant must be positive", bpos);
    }
    if (!p.at_end()) p.fail("unexpected trailing text", p.pos());

    auto sorted = [](Terms t) {
      std::sort(t.begin(), t.end());
      return t;
    };
    if (sorted(r.source) == sorted(r.product)) p.fail("source and product complexes are identical", 0);
    auto duplicate = [&](const Terms& s, const Terms& t) {
      for (const auto& q : raw)
        if (sorted(q.source) == sorted(s) && sorted(q.product) == sorted(t)) return true;
      return false;
    };
    if (duplicate(r.source, r.product)) p.fail("duplicate reaction", 0);
    raw.push_back(r);
    if (reversible) {
      if (duplicate(r.product, r.source)) p.fail("duplicate reaction", 0);
      raw.push_back({r.product, r.source, back, line_no});
    }
    if (end == text.size()) break;
  }

  ReactionNetwork net;
  net.species = species;
  net.kinetics.assign(species.size(), ThetaRule::mass_action());
  for (const auto& r : raw)
    net.reactions.push_back({to_complex(r.source, species.size()), to_complex(r.product, species.size()), r.kappa});
  std::vector<bool> seen(species.size(), false);
  for (const auto& t : thetas) {
    int i = net.species_index(t.name);
    if (i < 0) throw ParseError("kinetics given for unknown species '" + t.name + "'", t.line, t.col);
    if (seen[i]) throw ParseError("kinetics given twice for species '" + t.name + "'", t.line, t.col);
    seen[i] = true;
    net.kinetics[i] = t.rule;
  }
  if (net.reactions.empty()) throw ParseError("network has no reactions", line_no, 1);
  return net;
}

ReactionNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open network file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

std::string format_complex(const ReactionNetwork& net, const Complex& y) {
  if (y.is_zero()) return "0";
  std::string s;
  for (std::size_t i = 0; i < y.coeffs.size(); ++i) {
    if (!y.coeffs[i]) continue;
    if (!s.empty()) s += " + ";
    if (y.coeffs[i] != 1) s += std::to_string(y.coeffs[i]) + " ";
    s += net.species[i];
  }
  return s;
}

std::string format_network(const ReactionNetwork& net) {
  std::string out;
  for (const auto& r : net.reactions)
    out += format_complex(net, r.source) + " -> " + format_complex(net, r.product) + " : " + fmt_double(r.kappa) + "\n";
  for (std::size_t i = 0; i < net.kinetics.size(); ++i)
    if (net.kinetics[i].kind() != ThetaRule::Kind::mass_action)
      out += "theta " + net.species[i] + ": " + net.kinetics[i].describe() + "\n";
  return out;
}

}  // namespace ergograph
