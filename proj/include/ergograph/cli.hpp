#ifndef ERGOGRAPH_CLI_HPP
#define ERGOGRAPH_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ergograph/io.hpp"

namespace ergograph::cli {

struct RunConfig {
  std::string command;
  std::string network_path;
  std::optional<std::vector<int>> box;
  std::optional<double> alpha;
  std::optional<int> K;
  std::optional<int> k0;
  std::string family = "auto";  // auto | basic | layered; congestion also takes monotone
  std::optional<std::vector<double>> c;
  double eps = 0.25;
  std::optional<double> horizon;
  double burnin = -1.0;  // negative: a tenth of the horizon
  std::uint64_t seed = 42;
  std::optional<std::vector<int>> x0;
  std::vector<std::vector<int>> set;  // witness set
  std::optional<int> n;               // witness family index
  std::vector<double> times;          // tv curve sample times
  int levels = 3;                     // boxes in the S history, halving from --box
  double s_tolerance = 1e-4;
  bool certify = false;               // mixing: use a certificate instead of the numeric gap
  std::string output;
  std::string format = "json";
  unsigned threads = 1;
};

struct Report {
  std::string command;
  Json inputs;
  Json results = Json::object();
  std::vector<std::string> warnings;
  std::string version;
  int exit_code = 0;

  // Tabular payloads for CSV rendering.
  std::optional<Distribution> distribution;
  std::vector<TvPoint> curve;
  std::optional<Trajectory> trajectory;
  std::vector<std::string> species;
};

std::string version();

// Executes one command. Hard errors propagate as exceptions.
Report run(const RunConfig& config);

// JSON: {command, inputs, results, warnings, version}. CSV only for tabular results.
std::string render_report(const Report& report, const std::string& format);

// Parses argv, runs, writes the report and returns the process exit code.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ergograph::cli

#endif
