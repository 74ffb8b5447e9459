#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ergograph/cli.hpp"
#include "support.hpp"

using namespace ergograph;
using namespace ergograph::cli;

namespace {

struct Outcome {
  int code;
  std::string out, err;
  Json json() const { return Json::parse(out); }
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "ergograph");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("certify the key example") {
  auto r = invoke({"certify", example_path("key_example.rn"), "--alpha", "1", "--box", "40,40"});
  CHECK(r.code == 0);
  auto j = r.json();
  CHECK(j["command"] == "certify");
  double C = j["results"]["C"].get<double>();
  CHECK(C > 0.0);
  CHECK(C <= j["results"]["consistency"]["numeric_gap"].get<double>());
  CHECK(j["results"]["k0_or_partition"]["family"] == "layered");
}

TEST_CASE("check rejects the counterexample") {
  auto r = invoke({"check", example_path("counterexample.rn")});
  CHECK(r.code == 2);
  CHECK(r.json()["results"]["reason"] == "no single-species inflow/outflow");
  CHECK(r.err.find("conditions not satisfied") != std::string::npos);
}

TEST_CASE("balance at c = (1,1)") {
  auto r = invoke({"balance", example_path("open_cxb.rn"), "--c", "1,1"});
  CHECK(r.code == 0);
  auto res = r.json()["results"];
  CHECK(res["balance"]["balanced"] == true);
  CHECK(res["balance"]["max_abs_residual"] == 0.0);
}

TEST_CASE("hard errors exit with 1") {
  CHECK(invoke({"parse", "/nonexistent/file.rn"}).code == 1);
  CHECK(invoke({"gap", example_path("motivation.rn")}).code == 1);  // no --box
  CHECK(invoke({"gap", example_path("motivation.rn"), "--box", "3,3"}).code == 1);
  CHECK(invoke({"mixing", example_path("motivation.rn"), "--box", "20", "--eps", "0.7"}).code == 1);
}

TEST_CASE("reports are reproducible") {
  std::vector<std::string> args{"simulate", example_path("motivation.rn"), "--t", "50", "--seed", "3"};
  auto a = invoke(args);
  auto b = invoke(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  auto c = invoke({"simulate", example_path("motivation.rn"), "--t", "50", "--seed", "4"});
  CHECK(a.json()["inputs"]["digest"] != c.json()["inputs"]["digest"]);
}

TEST_CASE("gap report layout") {
  auto r = invoke({"gap", example_path("open_cxb.rn"), "--box", "12,12"});
  CHECK(r.code == 0);
  auto res = r.json()["results"];
  CHECK(res.contains("gap"));
  CHECK(res.contains("certificate"));
  CHECK(res.contains("witnesses"));
}

TEST_CASE("csv output") {
  auto st = invoke({"stationary", example_path("key_example.rn"), "--box", "3,3", "--format", "csv"});
  CHECK(st.code == 0);
  CHECK(st.out.rfind("x1,x2,prob\n", 0) == 0);

  auto mx = invoke({"mixing", example_path("motivation.rn"), "--box", "30", "--format", "csv"});
  CHECK(mx.code == 0);
  CHECK(mx.out.rfind("t,tv,bound\n", 0) == 0);

  CHECK(invoke({"check", example_path("open_cxb.rn"), "--format", "csv"}).code == 1);
}

TEST_CASE("witness on the counterexample") {
  auto r = invoke({"witness", example_path("counterexample.rn"), "--n", "9", "--box", "14,14"});
  CHECK(r.code == 0);
  double q = r.json()["results"]["quotient"].get<double>();
  CHECK(q > 0.0);
  CHECK(q < 0.25);
}

TEST_CASE("output file") {
  auto path = std::filesystem::temp_directory_path() / "ergograph_cli_test.json";
  auto r = invoke({"parse", example_path("motivation.rn"), "-o", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  CHECK(Json::parse(in)["results"]["species"][0] == "X1");
  std::filesystem::remove(path);
}

TEST_CASE("run without argv") {
  RunConfig cfg;
  cfg.command = "check";
  cfg.network_path = example_path("key_example.rn");
  auto rep = run(cfg);
  CHECK(rep.exit_code == 0);
  CHECK(rep.results["partition"]["layers"].size() == 2);
  CHECK(render_report(rep, "json") == render_report(run(cfg), "json"));
  CHECK_THROWS_AS(render_report(rep, "xml"), Error);
}
