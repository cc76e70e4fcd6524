#pragma once

#include "rrdvcr/topology.hpp"
#include "rrdvcr/types.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace rrdvcr {

/// One- and two-hop view of node `self`, as learned from two HELLO rounds.
struct NeighborTables {
  NodeId self = kNoNode;
  std::vector<NodeId> n1;
  std::vector<NodeId> n2;
  /// j in n1 -> j's alive one-hop neighbours other than self.
  std::map<NodeId, std::vector<NodeId>> reach;
  /// Selected relay subset of n1 -> the n2 members each one relays to.
  std::map<NodeId, std::vector<NodeId>> cover;

  bool in_cover(NodeId j) const { return cover.count(j) != 0; }
};

using Cover = std::map<NodeId, std::vector<NodeId>>;
using ForwarderPair = std::pair<NodeId, NodeId>;

inline NeighborTables collect_two_hop(const Topology& topology, NodeId i) {
  const auto& adj = radio_neighbors(topology, i);
  NeighborTables t;
  t.self = i;
  for (NodeId j : adj) {
    if (topology.nodes[j].alive) t.n1.push_back(j);
  }
  std::vector<NodeId> two;
  for (NodeId j : t.n1) {
    auto& r = t.reach[j];
    for (NodeId k : topology.adjacency[j]) {
      if (k == i || !topology.nodes[k].alive) continue;
      r.push_back(k);
      if (!std::binary_search(t.n1.begin(), t.n1.end(), k)) two.push_back(k);
    }
  }
  std::sort(two.begin(), two.end());
  two.erase(std::unique(two.begin(), two.end()), two.end());
  t.n2 = std::move(two);
  return t;
}

/// Greedy relay cover of n2. Sole coverers go in first; then the member
/// reaching the most still-uncovered n2 nodes is added until nothing coverable
/// remains. Ties: higher residual energy, then lower expected delay, then
/// lower id.
template <class EnergyFn, class DelayFn>
Cover select_cover(const NeighborTables& tables, EnergyFn&& energy, DelayFn&& delay) {
  const auto& n2 = tables.n2;
  const std::size_t m = tables.n1.size();
  // relays[a]: indices into n2 reached by the a-th member of n1.
  std::vector<std::vector<std::size_t>> relays(m);
  std::vector<int> coverers(n2.size(), 0);
  std::vector<NodeId> last(n2.size(), kNoNode);
  for (std::size_t a = 0; a < m; ++a) {
    const NodeId j = tables.n1[a];
    auto it = tables.reach.find(j);
    if (it == tables.reach.end()) continue;
    for (NodeId k : it->second) {
      auto pos = std::lower_bound(n2.begin(), n2.end(), k);
      if (pos == n2.end() || *pos != k) continue;
      const auto idx = static_cast<std::size_t>(pos - n2.begin());
      relays[a].push_back(idx);
      ++coverers[idx];
      last[idx] = static_cast<NodeId>(a);
    }
  }

  std::vector<char> uncovered(n2.size(), 0);
  for (std::size_t x = 0; x < n2.size(); ++x) uncovered[x] = coverers[x] > 0;
  std::vector<char> taken(m, 0);

  Cover cover;
  auto take = [&](std::size_t a) {
    taken[a] = 1;
    auto& list = cover[tables.n1[a]];
    for (std::size_t x : relays[a]) {
      list.push_back(n2[x]);
      uncovered[x] = 0;
    }
  };

  for (std::size_t x = 0; x < n2.size(); ++x) {
    if (coverers[x] == 1 && !taken[last[x]]) take(last[x]);
  }

  for (;;) {
    std::size_t best = m;
    std::size_t best_gain = 0;
    double best_e = 0.0;
    double best_d = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      if (taken[a]) continue;
      std::size_t gain = 0;
      for (std::size_t x : relays[a]) gain += uncovered[x] ? 1 : 0;
      if (gain == 0) continue;
      const NodeId j = tables.n1[a];
      const double e = energy(j);
      const double d = delay(j);
      const bool better = best == m || gain > best_gain ||
                          (gain == best_gain && (e > best_e || (e == best_e && d < best_d)));
      if (better) {
        best = a;
        best_gain = gain;
        best_e = e;
        best_d = d;
      }
    }
    if (best == m) break;
    take(best);
  }
  return cover;
}

inline Cover select_cover(const NeighborTables& tables) {
  return select_cover(tables, [](NodeId) { return 0.0; }, [](NodeId) { return 0.0; });
}

namespace detail {
inline bool progresses(const Height& from, const Height& to) { return from && to && *to < *from; }
} // namespace detail

/// One-hop neighbours strictly closer to the sink in hop count.
inline std::vector<NodeId> one_hop_forwarders(const NeighborTables& tables,
                                              std::span<const Height> heights) {
  std::vector<NodeId> out;
  const Height& hi = heights[tables.self];
  for (NodeId j : tables.n1) {
    if (detail::progresses(hi, heights[j])) out.push_back(j);
  }
  return out;
}

/// (j, k) with j a progressing cover member and k one of j's neighbours that
/// is strictly closer to the sink than self.
inline std::vector<ForwarderPair> two_hop_forwarders(const NeighborTables& tables,
                                                     std::span<const Height> heights) {
  std::vector<ForwarderPair> out;
  const Height& hi = heights[tables.self];
  for (NodeId j : one_hop_forwarders(tables, heights)) {
    if (!tables.in_cover(j)) continue;
    for (NodeId k : tables.reach.at(j)) {
      if (detail::progresses(hi, heights[k])) out.emplace_back(j, k);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace rrdvcr
