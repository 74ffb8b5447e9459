#include <cmath>
#include <random>

#include "doctest.h"
#include "ergograph/mixing.hpp"
#include "ergograph/spectral.hpp"
#include "support.hpp"

using namespace ergograph;

namespace {

TruncatedChain two_state() { return TruncatedChain::from_triples(Box({1}), {{0, 1, 1.0}, {1, 0, 1.0}}); }

}  // namespace

TEST_CASE("transient law") {
  auto chain = two_state();
  auto at0 = transient_distribution(chain, std::vector<int>{0}, 0.0);
  CHECK(at0.dist.p[0] == 1.0);
  CHECK(at0.dist.p[1] == 0.0);

  auto at1 = transient_distribution(chain, std::vector<int>{0}, 1.0);
  CHECK(at1.dist.p[0] == doctest::Approx(0.5 * (1.0 + std::exp(-2.0))).epsilon(1e-12));
  CHECK(at1.dist.total() == doctest::Approx(1.0).epsilon(1e-12));

  auto net = example("motivation");
  Box box({40});
  auto bd = build_truncated_chain(net, box);
  auto pi = product_form_stationary(net, std::vector<double>{1}, box).dist;
  auto late = transient_distribution(bd, std::vector<int>{0}, 20.0);
  CHECK(tv_distance(late.dist, pi) < 1e-9);

  CHECK_THROWS_AS(transient_distribution(chain, std::vector<int>{0}, -1.0), Error);
  CHECK_THROWS_AS(transient_distribution(chain, std::vector<int>{5}, 1.0), Error);
}

TEST_CASE("uniformization conserves mass") {
  auto chain = build_truncated_chain(example("key_example"), Box({15, 15}));
  for (double t : {0.1, 1.0, 5.0, 30.0}) {
    auto sol = transient_distribution(chain, std::vector<int>{3, 7}, t);
    CHECK(std::abs(sol.dist.total() - 1.0) <= 1e-12 + sol.error_bound);
  }
}

TEST_CASE("total variation") {
  Distribution a{Box({1}), {0.5, 0.5}, true};
  Distribution b{Box({1}), {1.0, 0.0}, true};
  Distribution c{Box({1}), {0.0, 1.0}, true};
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(b, c) == doctest::Approx(1.0));
  CHECK(tv_distance(a, b) == doctest::Approx(0.5));
  CHECK_THROWS_AS(tv_distance(a, Distribution{Box({2}), {1, 0, 0}, true}), Error);
}

TEST_CASE("numeric mixing time") {
  SUBCASE("two-state closed form") {
    auto chain = two_state();
    auto pi = solve_stationary_truncated(chain);
    double tau = mixing_time_numeric(chain, pi, std::vector<int>{0}, 0.25);
    CHECK(std::abs(tau - 0.25 * std::log(4.0)) < 1e-4);
  }
  SUBCASE("birth-death chain from 10 is within the spectral bound") {
    auto net = example("motivation");
    Box box({40});
    auto chain = build_truncated_chain(net, box);
    auto pi = solve_stationary_truncated(chain);
    double gap = estimate_gap(pi, chain).value;
    std::vector<int> x0{10};
    double tau = mixing_time_numeric(chain, pi, x0, 0.25);
    CHECK(tau <= (std::abs(std::log(0.125)) + std::abs(std::log(pi.at(x0)))) / gap);
  }
  SUBCASE("key example from (15,15)") {
    auto chain = build_truncated_chain(example("key_example"), Box({25, 25}));
    auto pi = solve_stationary_truncated(chain);
    double tau = mixing_time_numeric(chain, pi, std::vector<int>{15, 15}, 0.25);
    CHECK(std::isfinite(tau));
    CHECK(tau > 0.0);
  }
  SUBCASE("horizon too short") {
    auto chain = two_state();
    auto pi = solve_stationary_truncated(chain);
    MixingOptions opt;
    opt.horizon = 0.1;
    CHECK_THROWS_AS(mixing_time_numeric(chain, pi, std::vector<int>{0}, 0.25, opt), ConvergenceError);
  }
}

TEST_CASE("tv curve stays under the spectral bound") {
  auto net = example("open_cxb");
  auto chain = build_truncated_chain(net, Box({15, 15}));
  auto pi = solve_stationary_truncated(chain);
  double gap = estimate_gap(pi, chain).value;
  std::vector<double> times{0.5, 1, 2, 4, 8};
  auto curve = tv_curve(chain, pi, std::vector<int>{5, 5}, times, gap);
  REQUIRE(curve.size() == times.size());
  for (const auto& p : curve) CHECK(p.tv <= p.bound);
}

TEST_CASE("variance decay") {
  SUBCASE("two-state attains equality") {
    auto chain = two_state();
    auto pi = solve_stationary_truncated(chain);
    std::vector<double> f{1.0, -1.0};
    std::vector<double> times{0.0, 0.3, 1.0, 2.5};
    auto d = l2_decay_check(chain, pi, f, 2.0, times, 0.0);
    for (const auto& m : d.margins) CHECK(std::abs(m.variance - m.bound) < 1e-12);
  }
  SUBCASE("inflated rate is caught") {
    auto net = example("motivation");
    auto chain = build_truncated_chain(net, Box({40}));
    auto pi = solve_stationary_truncated(chain);
    double gap = estimate_gap(pi, chain).value;
    std::vector<double> f(41);
    for (int i = 0; i <= 40; ++i) f[i] = i;
    std::vector<double> times{1, 5, 10, 20};
    CHECK(l2_decay_check(chain, pi, f, gap, times).ok);
    auto bad = l2_decay_check(chain, pi, f, 1.1 * gap, times);
    CHECK_FALSE(bad.ok);
    REQUIRE(bad.first_violation);
  }
}

TEST_CASE("stochastic simulation") {
  auto net = example("motivation");
  SUBCASE("time average of the birth-death chain") {
    auto traj = ssa_simulate(net, std::vector<int>{0}, 1e4, 42);
    double area = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      double end = k + 1 < traj.size() ? traj.times[k + 1] : traj.horizon;
      area += traj.state(k)[0] * (end - traj.times[k]);
    }
    CHECK(std::abs(area / traj.horizon - 1.0) < 0.05);
  }
  SUBCASE("same seed, same path") {
    auto a = ssa_simulate(net, std::vector<int>{3}, 100.0, 9);
    auto b = ssa_simulate(net, std::vector<int>{3}, 100.0, 9);
    CHECK(a.times == b.times);
    CHECK(a.states == b.states);
    auto c = ssa_simulate(net, std::vector<int>{3}, 100.0, 10);
    CHECK(c.times != a.times);
  }
  SUBCASE("nothing enabled") {
    auto dead = parse_network("X1 -> 0 : 1");
    auto traj = ssa_simulate(dead, std::vector<int>{0}, 50.0, 1);
    CHECK(traj.size() == 1);
    auto occ = occupancy(traj);
    CHECK(occ[State{0}] == doctest::Approx(50.0));
  }
  SUBCASE("step cap") {
    SsaOptions opt;
    opt.max_steps = 10;
    CHECK_THROWS_AS(ssa_simulate(net, std::vector<int>{0}, 1e4, 1, opt), Error);
  }
}

TEST_CASE("empirical comparison") {
  auto net = example("motivation");
  auto traj = ssa_simulate(net, std::vector<int>{0}, 2e4, 5);
  Box box({15});
  auto pi = product_form_stationary(net, std::vector<double>{1}, box).dist;
  auto cmp = empirical_vs_stationary(traj, pi, 100.0);
  CHECK(cmp.tv < 0.05);
  CHECK(cmp.window == doctest::Approx(2e4 - 100.0));
  CHECK_THROWS_AS(empirical_vs_stationary(traj, pi, 2e4), Error);
}
