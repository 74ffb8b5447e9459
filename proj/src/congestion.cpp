#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "ergograph/paths.hpp"

namespace ergograph {

CongestionResult congestion_ratio(const Distribution& pi, const TruncatedChain& chain, const PathFamily* family) {
  const Box& box = chain.box();
  if (!(pi.box == box)) throw Error("distribution and chain use different boxes");
  if (family && family->dim() != box.dim()) throw Error("path family dimension does not match the box");
  const std::size_t d = box.dim();
  const std::size_t n = chain.size();

  std::vector<State> states(n);
  for (std::size_t s = 0; s < n; ++s) states[s] = chain.state(s);

  std::vector<std::vector<Move>> to_terminal;
  std::vector<State> terminals;
  if (family) {
    to_terminal.resize(n);
    terminals.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
      family->terminal_moves(states[s], to_terminal[s]);
      terminals[s] = family->terminal(states[s]);
    }
  }

  std::vector<double> load(n * 2 * d, 0.0);
  std::vector<std::uint64_t> stamp(box.size(), 0);
  std::vector<std::uint32_t> where(box.size(), 0);
  std::vector<std::size_t> walk;  // box indices of the loop-erased path
  std::vector<Move> moves, middle;
  std::uint64_t pair_id = 0;
  CongestionResult res;

  auto push_state = [&](std::size_t b) {
    if (stamp[b] == pair_id) {
      // erase the loop back to the earlier visit
      std::size_t keep = where[b] + 1;
      for (std::size_t k = keep; k < walk.size(); ++k) stamp[walk[k]] = 0;
      walk.resize(keep);
      return;
    }
    stamp[b] = pair_id;
    where[b] = static_cast<std::uint32_t>(walk.size());
    walk.push_back(b);
  };

  for (std::size_t x = 0; x < n; ++x) {
    const double px = pi.p[chain.box_index(x)];
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      const double py = pi.p[chain.box_index(y)];
      moves.clear();
      if (family) {
        moves = to_terminal[x];
        meet_path_moves(terminals[x], terminals[y], middle);
        moves.insert(moves.end(), middle.begin(), middle.end());
        for (auto it = to_terminal[y].rbegin(); it != to_terminal[y].rend(); ++it) moves.push_back({it->coord, -it->step});
      } else {
        meet_path_moves(states[x], states[y], moves);
      }
      ++pair_id;
      walk.clear();
      State z = states[x];
      std::size_t zb = chain.box_index(x);
      push_state(zb);
      for (const auto& m : moves) {
        z[m.coord] += m.step;
        if (!box.contains(z)) throw Error("congestion path leaves box " + box.describe());
        zb = box.index(z);
        push_state(zb);
      }
      const double weight = static_cast<double>(walk.size()) * px * py;
      for (std::size_t k = 0; k + 1 < walk.size(); ++k) {
        auto from = chain.chain_index(walk[k]);
        auto to = chain.chain_index(walk[k + 1]);
        if (!from || !to || !(chain.rate(*from, *to) > 0.0)) {
          State a = box.state(walk[k]), b = box.state(walk[k + 1]);
          throw InactivePathError("inactive path edge " + format_state(a) + " -> " + format_state(b), a, b);
        }
        std::size_t slot = 0;
        std::ptrdiff_t diff = static_cast<std::ptrdiff_t>(walk[k + 1]) - static_cast<std::ptrdiff_t>(walk[k]);
        for (std::size_t i = 0; i < d; ++i) {
          auto st = static_cast<std::ptrdiff_t>(box.stride(i));
          if (diff == st) slot = 2 * i;
          else if (diff == -st) slot = 2 * i + 1;
        }
        load[*from * 2 * d + slot] += weight;
      }
      ++res.pairs;
    }
  }

  for (std::size_t s = 0; s < n; ++s) {
    const double ps = pi.p[chain.box_index(s)];
    for (std::size_t slot = 0; slot < 2 * d; ++slot) {
      const double l = load[s * 2 * d + slot];
      if (l == 0.0) continue;
      State z = states[s], w = z;
      w[slot / 2] += (slot % 2 == 0) ? 1 : -1;
      const double q = chain.rate(s, *chain.chain_index(box.index(w)));
      const double ratio = l / (q * ps);
      if (ratio > res.value) {
        res.value = ratio;
        res.edge_from = z;
        res.edge_to = w;
      }
    }
  }
  return res;
}

}  // namespace ergograph
