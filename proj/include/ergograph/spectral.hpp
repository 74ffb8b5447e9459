#ifndef ERGOGRAPH_SPECTRAL_HPP
#define ERGOGRAPH_SPECTRAL_HPP

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "ergograph/ctmc.hpp"

namespace ergograph {

// Test functions are indexed by box index, like distributions.
struct DirichletForms {
  double standard = 0.0;   // -sum f(x)(f(z)-f(x)) pi(x) q(x,z)
  double symmetric = 0.0;  // 1/2 sum (f(x)-f(z))^2 pi(x) q(x,z)
};

DirichletForms dirichlet_forms(const Distribution& pi, const TruncatedChain& chain, std::span<const double> f);
double expectation(const Distribution& pi, std::span<const double> f);
double variance(const Distribution& pi, std::span<const double> f);
double rayleigh_quotient(const Distribution& pi, const TruncatedChain& chain, std::span<const double> f);

enum class GapMethod { dense, iterative };
std::string to_string(GapMethod m);

struct WitnessBound {
  std::string label;
  std::size_t set_size = 0;
  double mass = 0.0;
  double bound = 0.0;
};

struct GapEstimate {
  double value = 0.0;
  GapMethod method = GapMethod::dense;
  double residual = 0.0;
  Box box;
  std::vector<WitnessBound> witness_bounds;
};

struct GapOptions {
  std::size_t dense_limit = 600;
  // bound on |M u - lambda u| relative to max(1, |M|), |M| taken from Gershgorin rows
  double tolerance = 1e-8;
  std::size_t max_iterations = 4000;
  unsigned long long seed = 1;
};

// Smallest non-zero eigenvalue of the pi-symmetrized generator of the chain.
GapEstimate estimate_gap(const Distribution& pi, const TruncatedChain& chain, GapOptions options = {});

// M = D^{-1/2} A D^{-1/2}, A = (D(-Q) + (-Q)^T D)/2, over chain states.
Eigen::MatrixXd symmetrized_operator(const Distribution& pi, const TruncatedChain& chain);
void apply_symmetrized(const Distribution& pi, const TruncatedChain& chain, const Eigen::VectorXd& in,
                       Eigen::VectorXd& out);

// E*(f) for the normalized mean-zero indicator of A (box indices): an upper bound on the gap.
double witness_upper_bound(const Distribution& pi, const TruncatedChain& chain, std::span<const std::size_t> set);
std::vector<double> indicator_witness(const Distribution& pi, std::span<const std::size_t> set);

}  // namespace ergograph

#endif
