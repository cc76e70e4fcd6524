#pragma once

#include "rrdvcr/rng.hpp"
#include "rrdvcr/types.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace rrdvcr {

struct Position {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Position&, const Position&) = default;
};

inline double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct NodeState {
  NodeId id = 0;
  Position pos;
  Height height = kUnreachable;
  Energy energy_residual;
  Energy energy_initial;
  bool alive = true;
  double failure_prob = 0.0;
};

/// Sink-originated advertisement. Each hop rebroadcasts with height_count + 1.
struct AdvPacket {
  NodeId sink_id = kNoNode;
  NodeId source_id = kNoNode;
  Energy residual_energy;
  double link_quality = 1.0;
  std::uint32_t height_count = 1;
};

struct Topology {
  double field_width = 0.0;
  double field_height = 0.0;
  double radio_range = 0.0;
  std::uint64_t seed = 0;
  std::vector<NodeState> nodes;
  /// Symmetric unit-disk adjacency, sorted ascending per node.
  std::vector<std::vector<NodeId>> adjacency;

  std::size_t size() const { return nodes.size(); }
  bool contains(NodeId id) const { return id < nodes.size(); }
};

inline constexpr double kDefaultRadioRange = 40.0;
inline const Energy kDefaultInitialEnergy = Energy::joules(5.0);

namespace detail {

// Uniform grid with cell edge == range; neighbours live in the 3x3 block.
inline std::vector<std::vector<NodeId>> unit_disk_adjacency(const std::vector<NodeState>& nodes,
                                                            double range) {
  std::vector<std::vector<NodeId>> adj(nodes.size());
  if (nodes.empty()) return adj;
  auto cell_of = [range](double v) { return static_cast<std::int64_t>(std::floor(v / range)); };
  auto key = [](std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(cx + (1 << 20)) << 32) | static_cast<std::uint64_t>(cy + (1 << 20));
  };
  std::unordered_map<std::uint64_t, std::vector<NodeId>> grid;
  for (const auto& n : nodes) grid[key(cell_of(n.pos.x), cell_of(n.pos.y))].push_back(n.id);

  for (const auto& n : nodes) {
    const auto cx = cell_of(n.pos.x);
    const auto cy = cell_of(n.pos.y);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = grid.find(key(cx + dx, cy + dy));
        if (it == grid.end()) continue;
        for (NodeId m : it->second) {
          if (m != n.id && distance(n.pos, nodes[m].pos) <= range) adj[n.id].push_back(m);
        }
      }
    }
    std::sort(adj[n.id].begin(), adj[n.id].end());
  }
  return adj;
}

} // namespace detail

/// Builds a topology from explicit positions. Node ids follow input order.
inline Topology make_topology(const std::vector<Position>& positions, double field_width,
                              double field_height, double radio_range, std::uint64_t seed = 0,
                              Energy initial = kDefaultInitialEnergy) {
  if (!(field_width > 0.0) || !(field_height > 0.0)) {
    throw std::invalid_argument("field dimensions must be positive");
  }
  if (!(radio_range > 0.0)) throw std::invalid_argument("radio range must be positive");
  Topology t;
  t.field_width = field_width;
  t.field_height = field_height;
  t.radio_range = radio_range;
  t.seed = seed;
  t.nodes.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto& p = positions[i];
    if (p.x < 0.0 || p.x > field_width || p.y < 0.0 || p.y > field_height) {
      throw std::invalid_argument("node position outside the field");
    }
    NodeState n;
    n.id = static_cast<NodeId>(i);
    n.pos = p;
    n.energy_initial = initial;
    n.energy_residual = initial;
    t.nodes.push_back(n);
  }
  t.adjacency = detail::unit_disk_adjacency(t.nodes, radio_range);
  return t;
}

/// Homogeneous Poisson deployment. A zero draw is retried on the same stream;
/// after 32 empty draws the density is treated as degenerate.
inline Topology deploy_poisson(double field_width, double field_height, double density,
                               std::uint64_t rng_seed, double radio_range = kDefaultRadioRange,
                               Energy initial = kDefaultInitialEnergy) {
  if (!(field_width > 0.0) || !(field_height > 0.0)) {
    throw std::invalid_argument("field dimensions must be positive");
  }
  if (!(density > 0.0)) throw std::invalid_argument("density must be positive");

  Rng rng = make_stream(rng_seed, streams::kDeployment);
  std::poisson_distribution<std::int64_t> count_dist(density * field_width * field_height);
  std::int64_t count = 0;
  for (int attempt = 0; attempt < 32 && count == 0; ++attempt) count = count_dist(rng);
  if (count == 0) throw std::runtime_error("Poisson deployment drew zero nodes");

  std::vector<Position> positions(static_cast<std::size_t>(count));
  for (auto& p : positions) {
    p.x = uniform(rng, 0.0, field_width);
    p.y = uniform(rng, 0.0, field_height);
  }
  return make_topology(positions, field_width, field_height, radio_range, rng_seed, initial);
}

/// Sparse, line-like deployment: node i sits near x = (i + 0.5) * spacing with
/// jitter, anywhere across a narrow strip. Node 0 is the left end, node n-1
/// the right end.
inline Topology deploy_corridor(std::size_t node_count, double spacing, double strip_width,
                                std::uint64_t rng_seed, double radio_range = kDefaultRadioRange,
                                Energy initial = kDefaultInitialEnergy) {
  if (node_count < 2) throw std::invalid_argument("corridor needs at least two nodes");
  if (!(spacing > 0.0) || !(strip_width > 0.0)) {
    throw std::invalid_argument("corridor dimensions must be positive");
  }
  Rng rng = make_stream(rng_seed, streams::kDeployment);
  const double length = spacing * static_cast<double>(node_count);
  std::vector<Position> positions(node_count);
  for (std::size_t i = 0; i < node_count; ++i) {
    const double jitter = (i == 0 || i + 1 == node_count) ? 0.0 : uniform(rng, -0.4, 0.4);
    positions[i].x = (static_cast<double>(i) + 0.5 + jitter) * spacing;
    positions[i].y = uniform(rng, 0.0, strip_width);
  }
  return make_topology(positions, length, strip_width, radio_range, rng_seed, initial);
}

inline const std::vector<NodeId>& radio_neighbors(const Topology& topology, NodeId i) {
  if (!topology.contains(i)) throw std::out_of_range("unknown node " + std::to_string(i));
  return topology.adjacency[i];
}

/// Alive nearest node to `target`, skipping ids in `exclude`.
inline NodeId nearest_node(const Topology& topology, Position target,
                           const std::vector<NodeId>& exclude = {}) {
  NodeId best = kNoNode;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& n : topology.nodes) {
    if (!n.alive) continue;
    if (std::find(exclude.begin(), exclude.end(), n.id) != exclude.end()) continue;
    const double d = distance(n.pos, target);
    if (d < best_d) {
      best_d = d;
      best = n.id;
    }
  }
  if (best == kNoNode) throw std::runtime_error("no eligible node for placement");
  return best;
}

struct Gradient {
  std::vector<Height> heights;
  std::size_t adv_broadcasts = 0;
};

/// Floods ADV packets from `sink` over alive nodes. Deliveries are processed
/// FIFO, so the first ADV a node hears carries the lowest height_count; a
/// later, lower count still wins and triggers one more rebroadcast.
///
/// With `reliable`, a node only adopts heights heard over links the predicate
/// accepts; nodes the reliable flood never reaches then take the lowest
/// height offered over any link, in increasing height order.
inline Gradient build_height_gradient(const Topology& topology, NodeId sink,
                                      const std::function<double(NodeId, NodeId)>& link_mtx = {},
                                      const std::function<bool(NodeId, NodeId)>& reliable = {}) {
  if (!topology.contains(sink)) throw std::out_of_range("unknown sink " + std::to_string(sink));
  Gradient g;
  g.heights.assign(topology.size(), kUnreachable);
  if (!topology.nodes[sink].alive) return g;
  g.heights[sink] = 0;

  struct Delivery {
    NodeId to;
    AdvPacket adv;
  };
  std::deque<Delivery> air;
  std::vector<std::pair<std::uint32_t, NodeId>> weak; // (offered height, node) heard over rejected links
  auto broadcast = [&](NodeId from, std::uint32_t height_count) {
    ++g.adv_broadcasts;
    for (NodeId to : topology.adjacency[from]) {
      if (!topology.nodes[to].alive) continue;
      AdvPacket adv;
      adv.sink_id = sink;
      adv.source_id = from;
      adv.residual_energy = topology.nodes[from].energy_residual;
      adv.link_quality = link_mtx ? link_mtx(from, to) : 1.0;
      adv.height_count = height_count;
      air.push_back({to, adv});
    }
  };
  auto flood = [&] {
    while (!air.empty()) {
      const Delivery d = air.front();
      air.pop_front();
      if (d.to == sink) continue;
      auto& h = g.heights[d.to];
      if (h && *h <= d.adv.height_count) continue;
      if (reliable && !reliable(d.adv.source_id, d.to)) {
        weak.emplace_back(d.adv.height_count, d.to);
        continue;
      }
      h = d.adv.height_count;
      broadcast(d.to, d.adv.height_count + 1);
    }
  };

  broadcast(sink, 1);
  flood();
  while (reliable && !weak.empty()) {
    // Promote the lowest weak offer to a node still without a height, then let
    // it flood again (reliable links first).
    std::sort(weak.begin(), weak.end());
    auto it = std::find_if(weak.begin(), weak.end(), [&](const auto& w) { return !g.heights[w.second]; });
    if (it == weak.end()) break;
    const auto [height, node] = *it;
    weak.erase(it);
    g.heights[node] = height;
    broadcast(node, height + 1);
    flood();
  }
  return g;
}

// --- JSON -------------------------------------------------------------------

inline nlohmann::json to_json(const Topology& t) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : t.nodes) {
    nodes.push_back({{"id", n.id}, {"x", n.pos.x}, {"y", n.pos.y},
                     {"initial_energy_pj", n.energy_initial.pj()}});
  }
  return {{"seed", t.seed},
          {"radio_range", t.radio_range},
          {"field", {{"width", t.field_width}, {"height", t.field_height}}},
          {"nodes", nodes}};
}

inline Topology topology_from_json(const nlohmann::json& j) {
  const auto& nodes = j.at("nodes");
  std::vector<Position> positions(nodes.size());
  std::vector<Energy> energies(nodes.size());
  std::vector<bool> seen(nodes.size(), false);
  for (const auto& n : nodes) {
    const auto id = n.at("id").get<std::size_t>();
    if (id >= nodes.size() || seen[id]) throw std::invalid_argument("node ids must be dense and unique");
    seen[id] = true;
    positions[id] = {n.at("x").get<double>(), n.at("y").get<double>()};
    energies[id] = Energy::picojoules(n.at("initial_energy_pj").get<std::int64_t>());
  }
  Topology t = make_topology(positions, j.at("field").at("width").get<double>(),
                             j.at("field").at("height").get<double>(),
                             j.at("radio_range").get<double>(), j.at("seed").get<std::uint64_t>());
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    t.nodes[i].energy_initial = energies[i];
    t.nodes[i].energy_residual = energies[i];
  }
  return t;
}

} // namespace rrdvcr
