#include <cmath>
#include <sstream>

#include "doctest.h"
#include "ergograph/io.hpp"
#include "support.hpp"

using namespace ergograph;

TEST_CASE("digests") {
  // published FNV-1a 64 test vectors
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex_digest(0xafULL) == "00000000000000af");
}

TEST_CASE("shortest round-trip doubles") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  double x = 1.0 / 3.0;
  CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("json keeps a stable key order") {
  auto net = example("key_example");
  auto j = to_json(net);
  auto it = j.begin();
  CHECK(it.key() == "species");
  CHECK(j["reactions"].size() == 4);
  CHECK(j.dump() == to_json(net).dump());

  GapCertificate cert;
  cert.C = 0.5;
  cert.threshold = 6;
  auto cj = to_json(cert);
  std::vector<std::string> keys;
  for (auto i = cj.begin(); i != cj.end(); ++i) keys.push_back(i.key());
  CHECK(keys.front() == "alpha");
  CHECK(cj["k0_or_partition"]["k0"] == 6);
  CHECK(cj["consistency"].is_null());
}

TEST_CASE("non-finite numbers become strings") {
  CongestionResult c;
  c.value = INFINITY;
  c.edge_from = {0};
  c.edge_to = {1};
  auto j = to_json(c);
  CHECK(j["congestion_ratio"] == "inf");
}

TEST_CASE("distribution csv") {
  Distribution d{Box({1, 1}), {0.25, 0.25, 0.25, 0.25}, true};
  std::ostringstream os;
  write_distribution_csv(os, d);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x1,x2,prob");
  std::getline(in, line);
  CHECK(line == "0,0,0.25");
  std::getline(in, line);
  CHECK(line == "1,0,0.25");
}

TEST_CASE("tv curve and trajectory csv") {
  std::vector<TvPoint> curve{{0.5, 0.1, 0.2}};
  std::ostringstream os;
  write_tv_curve_csv(os, curve);
  CHECK(os.str() == "t,tv,bound\n0.5,0.1,0.2\n");

  Trajectory tr;
  tr.dim = 2;
  tr.horizon = 1.0;
  tr.times = {0.0, 0.5};
  tr.states = {1, 2, 1, 3};
  std::vector<std::string> species{"A", "B"};
  std::ostringstream ts;
  write_trajectory_csv(ts, tr, species);
  CHECK(ts.str() == "t,A,B\n0,1,2\n0.5,1,3\n");
}

TEST_CASE("chain coordinate list") {
  auto chain = build_truncated_chain(example("motivation"), Box({1}));
  std::ostringstream os;
  write_chain_coo(os, chain);
  CHECK(os.str() == "from,to,rate\n0,1,1\n1,0,1\n");
}
