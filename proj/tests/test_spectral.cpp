#include <cmath>
#include <random>

#include "doctest.h"
#include "ergograph/spectral.hpp"
#include "support.hpp"

using namespace ergograph;

namespace {

TruncatedChain two_state() { return TruncatedChain::from_triples(Box({1}), {{0, 1, 1.0}, {1, 0, 1.0}}); }

// Plain double sum over ordered pairs, independent of the library's edge loop.
double symmetric_form_oracle(const Distribution& pi, const TruncatedChain& chain, const std::vector<double>& f) {
  double e = 0.0;
  for (std::size_t a = 0; a < chain.size(); ++a)
    for (std::size_t b = 0; b < chain.size(); ++b) {
      double q = chain.rate(a, b);
      if (q == 0.0) continue;
      double d = f[chain.box_index(a)] - f[chain.box_index(b)];
      e += 0.5 * d * d * pi.p[chain.box_index(a)] * q;
    }
  return e;
}

}  // namespace

TEST_CASE("Dirichlet forms on small cases") {
  auto chain = two_state();
  Distribution pi{Box({1}), {0.5, 0.5}, true};
  std::vector<double> c{3.0, 3.0};
  auto z = dirichlet_forms(pi, chain, c);
  CHECK(z.standard == doctest::Approx(0.0));
  CHECK(z.symmetric == doctest::Approx(0.0));
  std::vector<double> f{0.0, 1.0};
  auto e = dirichlet_forms(pi, chain, f);
  CHECK(e.standard == doctest::Approx(0.5));
  CHECK(e.symmetric == doctest::Approx(0.5));
}

TEST_CASE("Dirichlet identity on the key example") {
  auto net = example("key_example");
  Box box({15, 15});
  auto chain = build_truncated_chain(net, box);
  auto pi = solve_stationary_truncated(chain);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> f(box.size());
    for (double& v : f) v = u(rng);
    auto e = dirichlet_forms(pi, chain, f);
    CHECK(std::abs(e.standard - e.symmetric) < 1e-10 * std::max(1.0, e.symmetric));
    CHECK(e.symmetric == doctest::Approx(symmetric_form_oracle(pi, chain, f)).epsilon(1e-12));
  }
}

TEST_CASE("variance") {
  Distribution two{Box({1}), {0.5, 0.5}, true};
  CHECK(variance(two, std::vector<double>{2.0, 2.0}) == doctest::Approx(0.0));
  CHECK(variance(two, std::vector<double>{0.0, 1.0}) == doctest::Approx(0.25));
  Distribution four{Box({3}), {0.25, 0.25, 0.25, 0.25}, true};
  CHECK(variance(four, std::vector<double>{1, 1, 0, 0}) == doctest::Approx(0.25));
}

TEST_CASE("spectral gap") {
  SUBCASE("two-state chain") {
    auto chain = two_state();
    auto g = estimate_gap(solve_stationary_truncated(chain), chain);
    CHECK(g.value == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("birth-death on [80] has gap one") {
    auto chain = build_truncated_chain(example("motivation"), Box({80}));
    auto pi = solve_stationary_truncated(chain);
    auto g = estimate_gap(pi, chain);
    CHECK(std::abs(g.value - 1.0) < 1e-3);
  }
  SUBCASE("iterative solve agrees with the dense one") {
    auto chain = build_truncated_chain(example("autocatalytic"), Box({20, 20}));
    auto pi = solve_stationary_truncated(chain);
    auto dense = estimate_gap(pi, chain);
    GapOptions opt;
    opt.dense_limit = 0;
    auto iter = estimate_gap(pi, chain, opt);
    CHECK(dense.method == GapMethod::dense);
    CHECK(iter.method == GapMethod::iterative);
    CHECK(iter.value == doctest::Approx(dense.value).epsilon(1e-9));
  }
  SUBCASE("symmetrized operator is symmetric and annihilates sqrt(pi)") {
    auto chain = build_truncated_chain(example("key_example"), Box({6, 6}));
    auto pi = solve_stationary_truncated(chain);
    auto M = symmetrized_operator(pi, chain);
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::VectorXd root(chain.size());
    for (std::size_t s = 0; s < chain.size(); ++s) root[s] = std::sqrt(pi.p[chain.box_index(s)]);
    CHECK((M * root).norm() < 1e-12);
  }
}

TEST_CASE("gap is bounded by Rayleigh quotients") {
  auto chain = build_truncated_chain(example("open_cxb"), Box({10, 10}));
  auto pi = solve_stationary_truncated(chain);
  double gap = estimate_gap(pi, chain).value;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  for (int k = 0; k < 10; ++k) {
    std::vector<double> f(chain.box().size());
    for (double& v : f) v = n01(rng);
    CHECK(gap <= rayleigh_quotient(pi, chain, f) + 1e-12);
  }
}

TEST_CASE("witness bounds") {
  SUBCASE("two-state singleton is tight") {
    auto chain = two_state();
    auto pi = solve_stationary_truncated(chain);
    std::vector<std::size_t> set{0};
    CHECK(witness_upper_bound(pi, chain, set) == doctest::Approx(2.0));
  }
  SUBCASE("counterexample boundary set") {
    auto net = example("counterexample");
    Box box({12, 12});
    auto chain = restrict_to_closed_class(build_truncated_chain(net, box), std::vector<int>{0, 0});
    auto pi = solve_stationary_truncated(chain);
    std::vector<std::size_t> set{box.index(std::vector<int>{9, 0}), box.index(std::vector<int>{10, 1})};
    double q = witness_upper_bound(pi, chain, set);
    CHECK(std::abs(q - 0.2) <= 0.1 * 0.2);
    CHECK(estimate_gap(pi, chain).value <= q + 1e-12);
  }
  SUBCASE("nearly everything is a poor witness") {
    auto chain = build_truncated_chain(example("motivation"), Box({12}));
    auto pi = solve_stationary_truncated(chain);
    std::vector<std::size_t> set;
    for (std::size_t i = 0; i < 12; ++i) set.push_back(i);
    // the flux out of the tiny complement is huge relative to its mass
    CHECK(witness_upper_bound(pi, chain, set) > 10.0);
  }
  SUBCASE("empty or full sets are rejected") {
    auto chain = two_state();
    auto pi = solve_stationary_truncated(chain);
    std::vector<std::size_t> all{0, 1};
    CHECK_THROWS_AS(witness_upper_bound(pi, chain, all), Error);
  }
}
