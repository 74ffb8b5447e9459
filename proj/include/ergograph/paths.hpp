#ifndef ERGOGRAPH_PATHS_HPP
#define ERGOGRAPH_PATHS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergograph/ctmc.hpp"
#include "ergograph/network.hpp"

namespace ergograph {

struct Move {
  int coord;
  int step;  // +1 or -1
  bool operator==(const Move&) const = default;
};

struct LatticePath {
  State start;
  std::vector<Move> moves;

  std::size_t size() const { return moves.size() + 1; }  // number of states
  State end() const;
  std::vector<State> states() const;
};

// Terminal map and paths to terminals, either the plain downward family or the
// layered family that first raises deficient coordinates along catalytic layers.
class PathFamily {
 public:
  enum class Kind { basic, layered };

  static PathFamily basic(std::size_t dim, double alpha, int K);
  // Explicit threshold k0 >= ceil(3/alpha); coordinates >= k0 are lowered.
  static PathFamily basic_with_threshold(std::size_t dim, double alpha, int K, int k0);
  static PathFamily layered(double alpha, int K, const CatalyticPartition& partition);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  double alpha() const { return alpha_; }
  int K() const { return K_; }
  int step() const { return step_; }            // ceil(3/alpha)
  int threshold() const { return threshold_; }  // k0 or N_{K,alpha}
  const std::optional<CatalyticPartition>& partition() const { return partition_; }
  const std::vector<int>& coordinate_order() const { return order_; }

  State terminal(std::span<const int> x) const;
  State intermediate(std::span<const int> x) const;  // equals x for the basic family
  void terminal_moves(std::span<const int> x, std::vector<Move>& out) const;
  LatticePath to_terminal(std::span<const int> x) const;
  std::size_t length_bound() const;  // bound on |gamma_x| in states

 private:
  Kind kind_ = Kind::basic;
  std::size_t dim_ = 0;
  double alpha_ = 1.0;
  int K_ = 1;
  int step_ = 3;
  int threshold_ = 0;
  std::optional<CatalyticPartition> partition_;
  std::vector<int> order_;
};

// Down-moves to the componentwise meet, then up-moves, each in ascending coordinate order.
void meet_path_moves(std::span<const int> a, std::span<const int> b, std::vector<Move>& out);
LatticePath meet_path(std::span<const int> a, std::span<const int> b);

bool lex_less(std::span<const int> a, std::span<const int> b);

// Rate of the unit move (coord, step) out of x under the model, summed over reactions.
double unit_move_rate(const ReactionNetwork& net, std::span<const int> x, const Move& m);

struct PathAudit {
  std::size_t Lbar = 0;
  std::size_t Mbar = 0;
  double R = 0.0;
  double cmin = 0.0;
  std::size_t states = 0;
  std::size_t terminals = 0;
  std::size_t terminal_paths = 0;
};

// Exhaustive scan of the box. Throws InactivePathError on a zero-rate edge.
PathAudit audit_path_family(const PathFamily& pf, const ReactionNetwork& net, const PiRule& rule, const Box& box);

struct SHistory {
  std::vector<std::pair<Box, double>> history;
  std::vector<double> relative_increments;
  bool shrinking = false;  // absolute increments strictly decrease
  bool converged = false;  // shrinking and the last relative increment is within tolerance
  double tolerance = 1e-4;
  std::string diagnostic;

  // Last partial sum plus the last absolute increment. With doubling boxes and
  // algebraically decaying terms the increment bounds the remaining tail.
  double with_tail_allowance() const;
};

// Sum over state pairs whose terminals t(x) < t(x') lexicographically of
// |gamma(t(x),t(x'))| pi(x) pi(x') / pi_min(gamma(t(x),t(x'))).
double congestion_sum_on_box(const PathFamily& pf, const PiRule& rule, const Box& box);
SHistory congestion_sum_S(const PathFamily& pf, const PiRule& rule, const std::vector<Box>& boxes,
                          double tolerance = 1e-4);

struct GapCertificate {
  double alpha = 0.0;
  int K = 0;
  PathFamily::Kind kind = PathFamily::Kind::basic;
  int threshold = 0;
  std::optional<CatalyticPartition> partition;
  PathAudit audit;
  SHistory S;
  double S_used = 0.0;  // S.with_tail_allowance()
  double C = 0.0;
  bool established = false;
  std::string reason;
  std::optional<double> numeric_gap;
  std::optional<Box> numeric_box;
};

// C = cmin / (16 Lbar Mbar R + 4 S). The audit runs on the largest box. The certificate
// is established when cmin > 0 and the S increments shrink; S.converged says whether the
// last increment also met the tolerance.
GapCertificate certify_gap(const PathFamily& pf, const ReactionNetwork& net, const PiRule& rule,
                           const std::vector<Box>& boxes, double s_tolerance = 1e-4);

// (1/C) (|ln(eps/2)| + |ln pi(x)|)
double mixing_bound_from_certificate(double C, double pi_x, double eps);
double mixing_bound_from_certificate(const GapCertificate& cert, const PiRule& rule, std::span<const int> x,
                                     double eps);

struct CongestionResult {
  double value = 0.0;
  State edge_from, edge_to;
  std::size_t pairs = 0;
};

// Canonical-path congestion over all ordered pairs of chain states. With a family the path of
// (x, y) is gamma_x, then the meet path between terminals, then gamma_y reversed, loop-erased;
// without one it is the meet path from x to y.
CongestionResult congestion_ratio(const Distribution& pi, const TruncatedChain& chain, const PathFamily* family);

}  // namespace ergograph

#endif
