#ifndef ERGOGRAPH_IO_HPP
#define ERGOGRAPH_IO_HPP

#include <cstdint>
#include <ostream>
#include <string_view>

#include "json.hpp"

#include "ergograph/mixing.hpp"
#include "ergograph/network.hpp"
#include "ergograph/paths.hpp"
#include "ergograph/spectral.hpp"

namespace ergograph {

using Json = nlohmann::ordered_json;

Json to_json(const Box& box);
Json to_json(std::span<const int> state);
Json to_json(const ReactionNetwork& net);
Json to_json(const ReactionNetwork& net, const BalanceReport& report);
Json to_json(const ReactionNetwork& net, const CatalyticPartition& partition);
Json to_json(const GapEstimate& gap);
Json to_json(const WitnessBound& w);
Json to_json(const PathAudit& audit);
Json to_json(const SHistory& s);
// {alpha, K, k0_or_partition, Lbar, Mbar, R, cmin, S_history, C, consistency, ...}
Json to_json(const GapCertificate& cert, const ReactionNetwork* net = nullptr);
Json to_json(const CongestionResult& c);
Json to_json(const MixingReport& m);
Json to_json(const DecayCheck& d);
Json to_json(const EmpiricalComparison& e);
Json to_json(const ResidualReport& r);

// Header x1,...,xd,prob; one row per box state in index order.
void write_distribution_csv(std::ostream& os, const Distribution& dist);
// Header t,tv,bound.
void write_tv_curve_csv(std::ostream& os, std::span<const TvPoint> curve);
// Header t,<species...>; one row per jump.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, std::span<const std::string> species);
// Header from,to,rate on box indices, rows in storage order.
void write_chain_coo(std::ostream& os, const TruncatedChain& chain);

// 64-bit FNV-1a, rendered as 16 hex digits.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex_digest(std::uint64_t h);

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace ergograph

#endif
