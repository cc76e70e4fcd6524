#pragma once

#include "rrdvcr/baselines.hpp"
#include "rrdvcr/forwarding_metric.hpp"
#include "rrdvcr/link_quality.hpp"
#include "rrdvcr/mac_energy.hpp"
#include "rrdvcr/neighbor.hpp"
#include "rrdvcr/rng.hpp"
#include "rrdvcr/scenario.hpp"
#include "rrdvcr/topology.hpp"
#include "rrdvcr/types.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rrdvcr {

struct Packet {
  std::uint32_t id = 0;
  NodeId source = kNoNode;
  NodeId destination = kNoNode;
  double created = 0.0;
  double d_req = 0.0;
  std::uint32_t h_s = 0;
  std::uint32_t attempts_total = 0;
  /// Every node that held the packet, source first.
  std::vector<NodeId> hops;
  double bits = 1200.0;
  /// Radio energy spent moving this packet (all attempts, tx and rx).
  Energy energy;
  bool done = false;
};

/// Declaration order is the tie-break priority for events at equal times.
enum class EventKind { NodeFail, UpdateTick, Deliver, Drop, HopAttempt, PacketGen };

inline std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::NodeFail: return "node_fail";
    case EventKind::UpdateTick: return "update_tick";
    case EventKind::Deliver: return "deliver";
    case EventKind::Drop: return "drop";
    case EventKind::HopAttempt: return "hop_attempt";
    case EventKind::PacketGen: return "packet_gen";
  }
  return "unknown";
}

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::PacketGen;
  std::uint64_t seq = 0;
  NodeId node = kNoNode;
  std::uint32_t packet = 0;
  DropReason reason = DropReason::NoRoute;

  friend bool operator>(const Event& a, const Event& b) {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.seq > b.seq;
  }
};

struct TraceRecord {
  double time = 0.0;
  std::string kind;
  NodeId node = kNoNode;
  std::int64_t packet = -1;
  std::int64_t energy_delta_pj = 0;
  std::string detail;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

inline nlohmann::json to_json(const TraceRecord& r) {
  return {{"t", r.time}, {"kind", r.kind}, {"node", r.node}, {"packet", r.packet},
          {"energy_delta_pj", r.energy_delta_pj}, {"detail", r.detail}};
}

inline void write_ndjson(std::ostream& os, const std::vector<TraceRecord>& trace) {
  for (const auto& r : trace) os << to_json(r).dump() << '\n';
}

struct RunMetrics {
  std::size_t generated = 0;
  std::size_t delivered = 0;
  std::size_t delivered_on_time = 0;
  std::size_t dropped = 0;
  double pdmr = 0.0;
  /// mJ per on-time delivery, counting only the energy those packets used.
  double ecpp_mj = 0.0;
  double mean_delay = 0.0;
  double worst_delay = 0.0;
  std::map<std::uint32_t, std::size_t> hop_counts;
  double mean_hops = 0.0;
  std::size_t control_packets = 0;
  std::map<std::string, std::size_t> drops_by_reason;

  // Integrity counters.
  std::size_t decisions = 0;
  std::size_t fallback_decisions = 0;
  std::size_t constraint_violations = 0;
  int max_attempts = 0;
  std::size_t node_deaths = 0;
  bool disconnected = false;
  Energy charged_total;
  Energy consumed_total;
  Energy data_energy;
  Energy control_energy;
  bool ledger_balanced = false;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

inline nlohmann::json to_json(const RunMetrics& m) {
  nlohmann::json hops = nlohmann::json::object();
  for (const auto& [h, c] : m.hop_counts) hops[std::to_string(h)] = c;
  return {{"generated", m.generated},
          {"delivered", m.delivered},
          {"delivered_on_time", m.delivered_on_time},
          {"dropped", m.dropped},
          {"pdmr", m.pdmr},
          {"ecpp_mJ", m.ecpp_mj},
          {"mean_delay_s", m.mean_delay},
          {"worst_delay_s", m.worst_delay},
          {"hop_counts", hops},
          {"mean_hops", m.mean_hops},
          {"control_packets", m.control_packets},
          {"drops_by_reason", m.drops_by_reason},
          {"decisions", m.decisions},
          {"fallback_decisions", m.fallback_decisions},
          {"constraint_violations", m.constraint_violations},
          {"max_attempts", m.max_attempts},
          {"node_deaths", m.node_deaths},
          {"disconnected", m.disconnected},
          {"charged_total_pj", m.charged_total.pj()},
          {"consumed_total_pj", m.consumed_total.pj()},
          {"data_energy_pj", m.data_energy.pj()},
          {"control_energy_pj", m.control_energy.pj()},
          {"ledger_balanced", m.ledger_balanced}};
}

struct RunResult {
  RunMetrics metrics;
  std::vector<TraceRecord> trace;
};

struct FailureEvent {
  NodeId node = kNoNode;
  double time = 0.0;
};

/// Assigns every unprotected node a failure probability U(0, failure_prob_max).
/// Nodes above `tolerance` are dead from the start; the rest fail with their
/// probability at a uniform time in [0, horizon).
inline std::vector<FailureEvent> inject_failures(Topology& topology, double failure_prob_max, double tolerance,
                                                 double horizon, std::span<const NodeId> protected_nodes,
                                                 Rng& rng) {
  if (failure_prob_max < 0.0 || failure_prob_max > 1.0) {
    throw std::invalid_argument("failure_prob_max must lie in [0,1]");
  }
  std::vector<FailureEvent> events;
  for (auto& n : topology.nodes) {
    if (std::find(protected_nodes.begin(), protected_nodes.end(), n.id) != protected_nodes.end()) continue;
    n.failure_prob = failure_prob_max > 0.0 ? uniform(rng, 0.0, failure_prob_max) : 0.0;
    // Draws are consumed for every node so outcomes stay aligned across sweeps.
    const double fate = uniform(rng, 0.0, 1.0);
    const double when = uniform(rng, 0.0, horizon);
    if (n.failure_prob > tolerance) {
      events.push_back({n.id, 0.0});
    } else if (fate < n.failure_prob) {
      events.push_back({n.id, when});
    }
  }
  return events;
}

class Simulator {
public:
  Simulator(ScenarioConfig cfg, Protocol protocol, std::uint64_t seed, bool keep_trace = false)
      : m_cfg(std::move(cfg)), m_protocol(protocol), m_seed(seed), m_keep_trace(keep_trace) {
    m_cfg.validate();
    setup();
  }

  RunResult run() {
    while (!m_queue.empty()) {
      const Event e = m_queue.top();
      m_queue.pop();
      m_now = e.time;
      dispatch(e);
    }
    finalize();
    return {m_metrics, std::move(m_trace)};
  }

  const Topology& topology() const { return m_topo; }
  const LinkTable& links() const { return m_links; }
  const std::vector<Height>& heights() const { return m_heights; }
  /// Tables of node n with its relay cover brought up to date.
  const NeighborTables& tables(NodeId n) {
    ensure_cover(n);
    return m_tables.at(n);
  }
  NodeId sink() const { return m_sink; }
  const std::vector<NodeId>& sources() const { return m_sources; }
  const RunMetrics& metrics() const { return m_metrics; }

  /// Publishes link estimates and energy snapshots, reselects relay covers
  /// and, for beacon-driven baselines, sends one beacon per alive node.
  void update_tick(double now) {
    m_now = now;
    m_links.publish_all(m_cfg.link.max_retry);
    for (const auto& n : m_topo.nodes) m_energy_snapshot[n.id] = n.energy_residual;
    refresh_covers();
    if (m_protocol != Protocol::Rrdvcr) {
      for (const auto& n : m_topo.nodes) {
        if (n.alive) broadcast_control(n.id, "beacon");
      }
    }
  }

  /// Marks a node dead and rebuilds gradient and neighbour tables.
  void kill_node(NodeId n, double now) {
    m_now = now;
    if (m_dead_handled.at(n)) return;
    m_topo.nodes[n].alive = false;
    m_dead_handled[n] = true;
    ++m_metrics.node_deaths;
    trace(EventKind::NodeFail, n, -1, Energy{}, "");
    rebuild_after_death(n);
  }

private:
  struct View {
    const Simulator* s;
    NodeId sink() const { return s->m_sink; }
    std::span<const Height> heights() const { return s->m_heights; }
    bool alive(NodeId a) const { return s->m_topo.nodes[a].alive; }
    double ed(NodeId a, NodeId b) const { return s->m_links.at(a, b).ed_cached; }
    double psucc(NodeId a, NodeId b) const { return s->m_links.at(a, b).psucc_cached; }
    double mtx(NodeId a, NodeId b) const { return s->m_links.at(a, b).mtx_cached; }
    Energy energy_residual(NodeId a) const { return s->m_energy_snapshot[a]; }
    Energy energy_initial(NodeId a) const { return s->m_topo.nodes[a].energy_initial; }
    Position position(NodeId a) const { return s->m_topo.nodes[a].pos; }
  };
  static_assert(GeoView<View>);

  bool height_based() const { return m_protocol != Protocol::Thvr; }

  void setup() {
    const Energy initial = Energy::joules(m_cfg.initial_energy);
    if (m_cfg.deployment == Deployment::Poisson) {
      m_topo = deploy_poisson(m_cfg.field_width, m_cfg.field_height, m_cfg.density, m_seed, m_cfg.radio_range,
                              initial);
      m_sink = nearest_node(m_topo, m_cfg.sink_pos);
      m_sources.push_back(nearest_node(m_topo, m_cfg.source_pos, {m_sink}));
    } else {
      m_topo = deploy_corridor(m_cfg.corridor_nodes, m_cfg.corridor_spacing, m_cfg.corridor_width, m_seed,
                               m_cfg.radio_range, initial);
      m_sink = static_cast<NodeId>(m_topo.size() - 1);
      m_sources.push_back(0);
    }
    // Extra sources sit at the primary's hop distance where possible, so the
    // source count changes load without changing path length.
    Rng place = make_stream(m_seed, streams::kSources);
    const std::vector<Height> hops = build_height_gradient(m_topo, m_sink).heights;
    while (m_sources.size() < m_cfg.sources) {
      const double r = m_cfg.source_region_radius;
      const Position c = m_cfg.source_pos;
      const Position p{uniform(place, std::max(0.0, c.x - r), std::min(m_topo.field_width, c.x + r)),
                       uniform(place, std::max(0.0, c.y - r), std::min(m_topo.field_height, c.y + r))};
      std::vector<NodeId> taken = m_sources;
      taken.push_back(m_sink);
      if (taken.size() >= m_topo.size()) throw std::runtime_error("not enough nodes for the requested sources");
      std::optional<NodeId> pick;
      double best = 0.0;
      for (const auto& node : m_topo.nodes) {
        if (hops[node.id] != hops[m_sources.front()]) continue;
        if (std::find(taken.begin(), taken.end(), node.id) != taken.end()) continue;
        const double d = distance(node.pos, p);
        if (!pick || d < best) {
          pick = node.id;
          best = d;
        }
      }
      m_sources.push_back(pick ? *pick : nearest_node(m_topo, p, taken));
    }

    const std::size_t n = m_topo.size();
    m_energy_snapshot.assign(n, Energy{});
    m_dead_handled.assign(n, false);
    m_death_pending.assign(n, false);
    m_cover_stale.assign(n, 1);
    m_tables.assign(n, NeighborTables{});
    for (NodeId i = 0; i < n; ++i) m_mac_rng.push_back(make_stream(m_seed, streams::kMacBase + i));

    const double last_gen = m_cfg.start_time + m_cfg.sim_time;
    m_end = last_gen + m_cfg.deadline() + m_cfg.update_interval;

    std::vector<NodeId> protect = m_sources;
    protect.push_back(m_sink);
    Rng fail = make_stream(m_seed, streams::kFailures);
    for (const auto& f : inject_failures(m_topo, m_cfg.failure_prob_max, m_cfg.failure_tolerance, last_gen,
                                         protect, fail)) {
      if (f.time <= 0.0) {
        m_topo.nodes[f.node].alive = false;
        m_dead_handled[f.node] = true;
        ++m_metrics.node_deaths;
      } else {
        push({f.time, EventKind::NodeFail, 0, f.node});
      }
    }

    m_links = LinkTable(m_topo, m_cfg.channel, m_cfg.link, estimate_ed(m_cfg.mac, m_cfg.packet_bits(), 1), m_seed);

    rebuild_gradient();
    for (NodeId s : m_sources) {
      if (!m_heights[s]) m_metrics.disconnected = true;
    }
    rebuild_tables();
    for (const auto& node : m_topo.nodes) {
      if (!node.alive) continue;
      // SPEED only needs one-hop tables; the two-hop protocols run two HELLO rounds.
      const int rounds = m_protocol == Protocol::Speed ? 1 : 2;
      for (int r = 0; r < rounds; ++r) broadcast_control(node.id, "hello");
    }
    for (const auto& node : m_topo.nodes) m_energy_snapshot[node.id] = node.energy_residual;
    m_links.publish_all(m_cfg.link.max_retry);
    refresh_covers();

    for (std::size_t s = 0; s < m_sources.size(); ++s) {
      const double offset = m_cfg.cbr_interval * static_cast<double>(s) / static_cast<double>(m_sources.size());
      push({m_cfg.start_time + offset, EventKind::PacketGen, 0, m_sources[s]});
    }
    push({m_cfg.update_interval, EventKind::UpdateTick, 0, kNoNode});
  }

  void push(Event e) {
    e.seq = m_seq++;
    m_queue.push(e);
  }

  void trace(EventKind kind, NodeId node, std::int64_t packet, Energy delta, std::string_view detail) {
    if (m_keep_trace) trace(to_string(kind).c_str(), node, packet, delta, detail);
  }
  void trace(const char* kind, NodeId node, std::int64_t packet, Energy delta, std::string_view detail) {
    if (!m_keep_trace) return;
    m_trace.push_back({m_now, kind, node, packet, delta.pj(), std::string(detail)});
  }

  Energy debit(NodeId n, double bits, Direction dir, const char* kind, std::int64_t packet) {
    auto& node = m_topo.nodes[n];
    const Energy before = node.energy_residual;
    node = charge(node, bits, dir, m_cfg.energy);
    const Energy spent = before - node.energy_residual;
    account(n, spent, kind, packet);
    return spent;
  }

  void account(NodeId n, Energy spent, const char* kind, std::int64_t packet) {
    m_metrics.charged_total += spent;
    if (spent != Energy{}) trace(kind, n, packet, spent, "");
    if (!m_topo.nodes[n].alive && !m_dead_handled[n] && !m_death_pending[n]) {
      m_death_pending[n] = true;
      push({m_now, EventKind::NodeFail, 0, n});
    }
  }

  void broadcast_control(NodeId from, const char* kind) {
    ++m_metrics.control_packets;
    const double bits = m_cfg.energy.control_packet_bits;
    m_metrics.control_energy += debit(from, bits, Direction::Tx, kind, -1);
    for (NodeId to : m_topo.adjacency[from]) {
      if (m_topo.nodes[to].alive) m_metrics.control_energy += debit(to, bits, Direction::Rx, kind, -1);
    }
  }

  void rebuild_gradient() {
    // Height-based protocols share the same ADV service, which prefers
    // heights heard over links that clear adv_gate.
    const double gate = m_cfg.metric.adv_gate;
    std::function<bool(NodeId, NodeId)> reliable;
    if (height_based() && gate > 0.0) {
      reliable = [&](NodeId a, NodeId b) { return m_links.at(b, a).psucc_cached >= gate; };
    }
    auto g = build_height_gradient(
        m_topo, m_sink, [&](NodeId a, NodeId b) { return m_links.at(a, b).mtx_cached; }, reliable);
    m_heights = std::move(g.heights);
    for (std::size_t i = 0; i < m_topo.size(); ++i) m_topo.nodes[i].height = m_heights[i];
    if (height_based()) {
      for (std::size_t i = 0; i < m_topo.size(); ++i) {
        if (m_heights[i] && m_topo.nodes[i].alive) broadcast_control(static_cast<NodeId>(i), "adv");
      }
    }
  }

  void rebuild_tables() {
    for (const auto& node : m_topo.nodes) {
      m_tables[node.id] = node.alive ? collect_two_hop(m_topo, node.id) : NeighborTables{};
    }
  }

  // Covers only change when snapshots are republished, so they are
  // recomputed on first use after a refresh.
  void refresh_covers() { std::fill(m_cover_stale.begin(), m_cover_stale.end(), 1); }

  void ensure_cover(NodeId i) {
    if (!m_cover_stale.at(i)) return;
    m_cover_stale[i] = 0;
    auto& t = m_tables[i];
    if (!m_topo.nodes[i].alive) {
      t.cover.clear();
      return;
    }
    t.cover = select_cover(
        t, [&](NodeId j) { return m_energy_snapshot[j].as_joules(); },
        [&](NodeId j) { return m_links.at(i, j).ed_cached; });
  }

  void rebuild_after_death(NodeId dead) {
    rebuild_gradient();
    rebuild_tables();
    if (m_protocol == Protocol::Rrdvcr) {
      // Neighbours of the dead node re-announce themselves.
      for (NodeId m : m_topo.adjacency[dead]) {
        if (m_topo.nodes[m].alive) broadcast_control(m, "hello");
      }
    }
    refresh_covers();
  }

  void dispatch(const Event& e) {
    switch (e.kind) {
      case EventKind::PacketGen: on_generate(e); break;
      case EventKind::HopAttempt: on_hop(e); break;
      case EventKind::Deliver: on_deliver(e); break;
      case EventKind::Drop: finish_drop(e.packet, e.node, e.reason); break;
      case EventKind::UpdateTick:
        update_tick(e.time);
        if (e.time + m_cfg.update_interval <= m_end) {
          push({e.time + m_cfg.update_interval, EventKind::UpdateTick, 0, kNoNode});
        }
        break;
      case EventKind::NodeFail: kill_node(e.node, e.time); break;
    }
  }

  void on_generate(const Event& e) {
    Packet p;
    p.id = static_cast<std::uint32_t>(m_packets.size());
    p.source = e.node;
    p.destination = m_sink;
    p.created = e.time;
    p.d_req = m_cfg.deadline();
    p.bits = m_cfg.packet_bits();
    p.hops.push_back(e.node);
    const Height hs = m_heights[e.node];
    p.h_s = hs ? *hs : 0;
    m_packets.push_back(p);
    ++m_metrics.generated;
    trace(EventKind::PacketGen, e.node, p.id, Energy{}, "");

    if (height_based() && !hs) {
      finish_drop(p.id, e.node, DropReason::NoRoute);
    } else {
      on_hop({e.time, EventKind::HopAttempt, 0, e.node, p.id});
    }

    const double next = e.time + m_cfg.cbr_interval;
    if (next < m_cfg.start_time + m_cfg.sim_time) push({next, EventKind::PacketGen, 0, e.node});
  }

  Decision decide(NodeId i, const DeadlineState& ds) {
    const View view{this};
    switch (m_protocol) {
      case Protocol::Rrdvcr: ensure_cover(i); return select_forwarder(i, ds, m_tables[i], view, m_cfg.metric);
      case Protocol::Thvr: return thvr_select(i, ds, m_tables[i], view, m_cfg.metric);
      case Protocol::Speed: return speed_baseline_select(i, ds, m_tables[i], view, m_cfg.metric);
    }
    return Drop{DropReason::NoRoute};
  }

  void on_hop(const Event& e) {
    Packet& p = m_packets[e.packet];
    if (p.done) return;
    const NodeId i = e.node;
    if (!m_topo.nodes[i].alive) return finish_drop(p.id, i, DropReason::NodeDead);

    DeadlineState ds;
    ds.d_req = p.d_req;
    ds.rt = p.d_req - (e.time - p.created);
    ds.h_i = m_heights[i] ? *m_heights[i] : 0;
    ds.h_s = p.h_s;
    if (!(ds.rt > 0.0)) return finish_drop(p.id, i, DropReason::DeadlineMissed);

    const Decision d = decide(i, ds);
    ++m_metrics.decisions;
    if (const auto* drop = std::get_if<Drop>(&d)) return finish_drop(p.id, i, drop->reason);
    if (std::holds_alternative<FallbackForward>(d)) ++m_metrics.fallback_decisions;
    if (const auto* fwd = std::get_if<Forward>(&d); fwd && m_protocol == Protocol::Rrdvcr) {
      if (!satisfies_constraints(i, *fwd, ds, View{this}, m_cfg.metric)) ++m_metrics.constraint_violations;
    }

    const NodeId j = next_hop(d);
    if (m_keep_trace) {
      std::string what = std::holds_alternative<FallbackForward>(d) ? "fallback " : "forward ";
      what += std::to_string(j);
      if (const auto* fwd = std::get_if<Forward>(&d)) what += " " + std::to_string(fwd->k);
      trace("decide", i, p.id, Energy{}, what);
    }
    if (std::find(p.hops.begin(), p.hops.end(), j) != p.hops.end()) {
      return finish_drop(p.id, i, DropReason::LoopDetected);
    }

    HopRequest req;
    req.true_p = m_links.at(i, j).true_psucc() * congestion_factor();
    req.max_retry = m_cfg.link.max_retry;
    req.bits = p.bits;
    req.candidate_index = 1;
    req.ed_smoothing = m_cfg.link.ed_smoothing;
    auto& sender = m_topo.nodes[i];
    auto& receiver = m_topo.nodes[j];
    const HopOutcome out = attempt_hop(m_links.at(i, j), sender, receiver, req, m_cfg.mac, m_cfg.energy,
                                       m_mac_rng[i]);

    for (const auto& c : out.charges) {
      p.energy += c.amount;
      m_metrics.data_energy += c.amount;
      account(c.node, c.amount, c.dir == Direction::Tx ? "tx" : "rx", p.id);
    }
    p.attempts_total += static_cast<std::uint32_t>(out.attempts);
    m_metrics.max_attempts = std::max(m_metrics.max_attempts, out.attempts);

    const double arrive = e.time + out.elapsed;
    if (!out.delivered) {
      push({arrive, EventKind::Drop, 0, i, p.id, DropReason::LinkFailure});
      return;
    }
    p.hops.push_back(j);
    if (j == m_sink) {
      push({arrive, EventKind::Deliver, 0, j, p.id});
    } else {
      push({arrive, EventKind::HopAttempt, 0, j, p.id});
    }
  }

  double congestion_factor() const {
    const double cut = m_cfg.congestion_penalty * static_cast<double>(m_sources.size() - 1);
    return std::max(0.0, 1.0 - cut);
  }

  void on_deliver(const Event& e) {
    Packet& p = m_packets[e.packet];
    if (p.done) return;
    p.done = true;
    ++m_metrics.delivered;
    const double delay = e.time - p.created;
    const auto hops = static_cast<std::uint32_t>(p.hops.size() - 1);
    ++m_metrics.hop_counts[hops];
    const bool on_time = delay <= p.d_req;
    if (on_time) {
      ++m_metrics.delivered_on_time;
      m_delay_sum += delay;
      m_metrics.worst_delay = std::max(m_metrics.worst_delay, delay);
      m_on_time_energy += p.energy;
    }
    trace(EventKind::Deliver, e.node, p.id, Energy{}, on_time ? "on_time" : "late");
  }

  void finish_drop(std::uint32_t packet, NodeId at, DropReason reason) {
    Packet& p = m_packets[packet];
    if (p.done) return;
    p.done = true;
    ++m_metrics.dropped;
    ++m_metrics.drops_by_reason[to_string(reason)];
    trace(EventKind::Drop, at, p.id, Energy{}, to_string(reason));
  }

  void finalize() {
    auto& m = m_metrics;
    if (m.generated > 0) {
      m.pdmr = static_cast<double>(m.generated - m.delivered_on_time) / static_cast<double>(m.generated);
    }
    if (m.delivered_on_time > 0) {
      m.ecpp_mj = m_on_time_energy.as_millijoules() / static_cast<double>(m.delivered_on_time);
      m.mean_delay = m_delay_sum / static_cast<double>(m.delivered_on_time);
    }
    std::size_t hop_total = 0;
    for (const auto& [h, c] : m.hop_counts) hop_total += static_cast<std::size_t>(h) * c;
    if (m.delivered > 0) m.mean_hops = static_cast<double>(hop_total) / static_cast<double>(m.delivered);
    Energy consumed;
    for (const auto& n : m_topo.nodes) consumed += n.energy_initial - n.energy_residual;
    m.consumed_total = consumed;
    m.ledger_balanced = consumed == m.charged_total;
  }

  ScenarioConfig m_cfg;
  Protocol m_protocol;
  std::uint64_t m_seed;
  bool m_keep_trace;

  Topology m_topo;
  LinkTable m_links;
  std::vector<Height> m_heights;
  std::vector<NeighborTables> m_tables;
  std::vector<Energy> m_energy_snapshot;
  std::vector<bool> m_dead_handled;
  std::vector<bool> m_death_pending;
  std::vector<char> m_cover_stale;
  std::vector<Rng> m_mac_rng;
  NodeId m_sink = kNoNode;
  std::vector<NodeId> m_sources;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> m_queue;
  std::uint64_t m_seq = 0;
  double m_now = 0.0;
  double m_end = 0.0;

  std::vector<Packet> m_packets;
  RunMetrics m_metrics;
  double m_delay_sum = 0.0;
  Energy m_on_time_energy;
  std::vector<TraceRecord> m_trace;
};

inline RunResult run_scenario(const ScenarioConfig& cfg, Protocol protocol, std::uint64_t seed,
                              bool keep_trace = false) {
  return Simulator(cfg, protocol, seed, keep_trace).run();
}

} // namespace rrdvcr
