#pragma once

#include "rrdvcr/forwarding_metric.hpp"
#include "rrdvcr/neighbor.hpp"
#include "rrdvcr/topology.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace rrdvcr {

template <class V>
concept GeoView = NetworkView<V> && requires(const V& v, NodeId a) {
  { v.position(a) } -> std::convertible_to<Position>;
};

/// THVR-style two-hop velocity routing: progress is geographic distance to
/// the sink, any alive one-hop neighbour may relay, the score weighs speed
/// against the relay's energy with a fixed beta, and link quality is not
/// consulted.
template <GeoView V>
Decision thvr_select(NodeId i, const DeadlineState& ds, const NeighborTables& tables, const V& view,
                     const MetricConfig& cfg) {
  if (!(ds.rt > 0.0)) return Drop{DropReason::DeadlineMissed};
  const NodeId sink = view.sink();
  if (std::binary_search(tables.n1.begin(), tables.n1.end(), sink) && view.alive(sink)) {
    return Forward{sink, sink, 0.0};
  }
  const Position dest = view.position(sink);
  const double d_i = distance(view.position(i), dest);
  const double need = required_speed(d_i, ds.rt);

  std::vector<Candidate> candidates;
  for (NodeId j : tables.n1) {
    if (!view.alive(j) || view.energy_residual(j) < energy_threshold(view, j, cfg)) continue;
    for (NodeId k : tables.reach.at(j)) {
      if (!view.alive(k)) continue;
      const double d_k = distance(view.position(k), dest);
      if (!(d_k < d_i)) continue;
      const double speed = two_hop_speed(d_i, d_k, view.ed(i, j), view.ed(j, k));
      if (speed < need) continue;
      Candidate c;
      c.j = j;
      c.k = k;
      c.speed = speed;
      c.energy_frac = energy_fraction(view, j);
      candidates.push_back(c);
    }
  }
  if (!candidates.empty()) {
    const auto scored = thvr_metric(std::move(candidates), cfg.beta);
    const auto& best = best_candidate(scored);
    return Forward{best.j, best.k, best.score};
  }

  std::optional<NodeId> best;
  for (NodeId j : tables.n1) {
    if (!view.alive(j) || view.energy_residual(j) < energy_threshold(view, j, cfg)) continue;
    if (!(distance(view.position(j), dest) < d_i)) continue;
    if (!best || view.energy_residual(j) > view.energy_residual(*best)) best = j;
  }
  if (best) return FallbackForward{*best};
  return Drop{DropReason::NoRoute};
}

/// SPEED-style one-hop choice: among neighbours with hop progress, take the
/// highest velocity (progress / ed). No fallback; if even the fastest
/// neighbour is too slow the packet is dropped.
template <NetworkView V>
Decision speed_baseline_select(NodeId i, const DeadlineState& ds, const NeighborTables& tables, const V& view,
                               const MetricConfig& cfg) {
  if (!(ds.rt > 0.0)) return Drop{DropReason::DeadlineMissed};
  // An adjacent sink is just the neighbour with the most progress; it wins
  // unless its measured delay says otherwise.
  const auto heights = view.heights();
  if (!heights[i]) return Drop{DropReason::NoRoute};
  const double need = required_speed(static_cast<double>(ds.h_i), ds.rt);

  std::optional<NodeId> best;
  double best_v = 0.0;
  for (NodeId j : one_hop_forwarders(tables, heights)) {
    if (!view.alive(j) || view.energy_residual(j) < energy_threshold(view, j, cfg)) continue;
    const double v = static_cast<double>(*heights[i] - *heights[j]) / view.ed(i, j);
    if (!best || v > best_v) {
      best = j;
      best_v = v;
    }
  }
  if (!best) return Drop{DropReason::NoRoute};
  if (best_v < need) return Drop{DropReason::SpeedUnmet};
  return Forward{*best, *best, best_v};
}

} // namespace rrdvcr
