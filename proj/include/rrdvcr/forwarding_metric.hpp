#pragma once

#include "rrdvcr/neighbor.hpp"
#include "rrdvcr/types.hpp"

#include <algorithm>
#include <concepts>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rrdvcr {

/// How the link-quality term of the RRDVCR score is formed.
///  Literal:     MTX(i,j) / sum over candidates of MTX(j,k), as printed.
///  Reliability: 1 / (MTX(i,j) * MTX(j,k)) normalised over the candidates.
///  Off:         term dropped (weight 0).
enum class MtxTermMode { Literal, Reliability, Off };

/// Paper: rt/D if rt/D <= h_i/h_s, else 1 - rt/D.  Monotone: 1 - rt/D.
enum class FMode { Paper, Monotone };

inline std::string to_string(MtxTermMode m) {
  switch (m) {
    case MtxTermMode::Literal: return "literal";
    case MtxTermMode::Reliability: return "reliability";
    case MtxTermMode::Off: return "off";
  }
  return "unknown";
}

inline MtxTermMode parse_mtx_mode(const std::string& s) {
  if (s == "literal") return MtxTermMode::Literal;
  if (s == "reliability") return MtxTermMode::Reliability;
  if (s == "off") return MtxTermMode::Off;
  throw std::invalid_argument("unknown mtx mode '" + s + "'");
}

inline std::string to_string(FMode m) { return m == FMode::Paper ? "paper" : "monotone"; }

inline FMode parse_f_mode(const std::string& s) {
  if (s == "paper") return FMode::Paper;
  if (s == "monotone") return FMode::Monotone;
  throw std::invalid_argument("unknown f mode '" + s + "'");
}

struct MetricConfig {
  MtxTermMode mtx_term_mode = MtxTermMode::Reliability;
  FMode f_mode = FMode::Paper;
  /// When set, replaces f(rt) with a constant.
  std::optional<double> fixed_f;
  double beta = 0.5;
  double reliability_gate = 0.5;
  /// ADV heights are adopted only over links with psucc at or above this;
  /// 0 gives the plain hop-count gradient.
  double adv_gate = 0.5;
  /// E_th as a fraction of each node's initial energy.
  double e_threshold_fraction = 0.1;

  void validate() const {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(beta)) throw std::invalid_argument("beta must lie in [0,1]");
    if (!unit(reliability_gate)) throw std::invalid_argument("reliability_gate must lie in [0,1]");
    if (!unit(adv_gate)) throw std::invalid_argument("adv_gate must lie in [0,1]");
    if (!unit(e_threshold_fraction)) throw std::invalid_argument("e_threshold_fraction must lie in [0,1]");
    if (fixed_f && !unit(*fixed_f)) throw std::invalid_argument("fixed_f must lie in [0,1]");
  }
};

struct Candidate {
  NodeId j = kNoNode;
  NodeId k = kNoNode;
  double speed = 0.0;
  double mtx_ij = 1.0;
  double mtx_jk = 1.0;
  double energy_frac = 1.0;
  double score = 0.0;
};

struct DeadlineState {
  double d_req = 0.0;
  double rt = 0.0;
  std::uint32_t h_i = 0;
  std::uint32_t h_s = 0;
};

class NoCandidate : public std::runtime_error {
public:
  NoCandidate() : std::runtime_error("candidate set is empty") {}
};

inline double required_speed(double n_hops, double d_req) {
  if (!(d_req > 0.0)) throw std::invalid_argument("deadline must be positive");
  return n_hops / d_req;
}

inline double two_hop_speed(double h_i, double h_k, double ed_ij, double ed_jk) {
  const double total = ed_ij + ed_jk;
  if (!(total > 0.0)) throw std::invalid_argument("two-hop delay must be positive");
  return (h_i - h_k) / total;
}

inline double f_rt(double rt, double d_req, double h_i, double h_s, FMode mode) {
  if (!(h_s >= 1.0)) throw std::invalid_argument("source height must be >= 1");
  if (!(d_req > 0.0)) throw std::invalid_argument("deadline must be positive");
  if (rt < 0.0 || rt > d_req) throw std::invalid_argument("remaining time outside [0, d_req]");
  const double ratio = rt / d_req;
  if (mode == FMode::Monotone) return 1.0 - ratio;
  return ratio <= h_i / h_s ? ratio : 1.0 - ratio;
}

namespace detail {
inline double share(double v, double total, std::size_t n) {
  return total > 0.0 ? v / total : 1.0 / static_cast<double>(n);
}
} // namespace detail

/// beta * speed share + (1 - beta) * energy share. energy_frac is expected to
/// describe the relay j.
inline std::vector<Candidate> thvr_metric(std::vector<Candidate> candidates, double beta) {
  if (candidates.empty()) throw NoCandidate{};
  double speeds = 0.0;
  double energies = 0.0;
  for (const auto& c : candidates) {
    speeds += c.speed;
    energies += c.energy_frac;
  }
  const auto n = candidates.size();
  for (auto& c : candidates) {
    c.score = beta * detail::share(c.speed, speeds, n) +
              (1.0 - beta) * detail::share(c.energy_frac, energies, n);
  }
  return candidates;
}

/// f * speed share + f * link term + (1 - f) * energy share (energy of k).
inline std::vector<Candidate> rrdvcr_metric(std::vector<Candidate> candidates, double f, MtxTermMode mode) {
  if (candidates.empty()) throw NoCandidate{};
  const auto n = candidates.size();
  double speeds = 0.0;
  double energies = 0.0;
  double links = 0.0;
  for (const auto& c : candidates) {
    speeds += c.speed;
    energies += c.energy_frac;
    links += mode == MtxTermMode::Literal ? c.mtx_jk : 1.0 / (c.mtx_ij * c.mtx_jk);
  }
  for (auto& c : candidates) {
    double link_term = 0.0;
    switch (mode) {
      case MtxTermMode::Literal: link_term = c.mtx_ij / links; break;
      case MtxTermMode::Reliability: link_term = detail::share(1.0 / (c.mtx_ij * c.mtx_jk), links, n); break;
      case MtxTermMode::Off: break;
    }
    c.score = f * detail::share(c.speed, speeds, n) + f * link_term +
              (1.0 - f) * detail::share(c.energy_frac, energies, n);
  }
  return candidates;
}

/// Highest score; earlier entries win ties, so callers sort by (j, k) first.
inline const Candidate& best_candidate(const std::vector<Candidate>& scored) {
  if (scored.empty()) throw NoCandidate{};
  const Candidate* best = &scored.front();
  for (const auto& c : scored) {
    if (c.score > best->score) best = &c;
  }
  return *best;
}

// --- decisions --------------------------------------------------------------

enum class DropReason { DeadlineMissed, NoRoute, SpeedUnmet, LinkFailure, LoopDetected, NodeDead };

inline std::string to_string(DropReason r) {
  switch (r) {
    case DropReason::DeadlineMissed: return "deadline_missed";
    case DropReason::NoRoute: return "no_route";
    case DropReason::SpeedUnmet: return "speed_unmet";
    case DropReason::LinkFailure: return "link_failure";
    case DropReason::LoopDetected: return "loop_detected";
    case DropReason::NodeDead: return "node_dead";
  }
  return "unknown";
}

struct Forward {
  NodeId j = kNoNode;
  NodeId k = kNoNode;
  double score = 0.0;
};
struct FallbackForward {
  NodeId j = kNoNode;
};
struct Drop {
  DropReason reason = DropReason::NoRoute;
};

using Decision = std::variant<Forward, FallbackForward, Drop>;

inline NodeId next_hop(const Decision& d) {
  if (const auto* f = std::get_if<Forward>(&d)) return f->j;
  if (const auto* f = std::get_if<FallbackForward>(&d)) return f->j;
  return kNoNode;
}

/// What a forwarding node can see: published link estimates, neighbour
/// energy snapshots and the height gradient. Link queries are only made for
/// adjacent pairs.
template <class V>
concept NetworkView = requires(const V& v, NodeId a, NodeId b) {
  { v.sink() } -> std::convertible_to<NodeId>;
  { v.heights() } -> std::convertible_to<std::span<const Height>>;
  { v.alive(a) } -> std::convertible_to<bool>;
  { v.ed(a, b) } -> std::convertible_to<double>;
  { v.psucc(a, b) } -> std::convertible_to<double>;
  { v.mtx(a, b) } -> std::convertible_to<double>;
  { v.energy_residual(a) } -> std::convertible_to<Energy>;
  { v.energy_initial(a) } -> std::convertible_to<Energy>;
};

template <NetworkView V>
Energy energy_threshold(const V& view, NodeId n, const MetricConfig& cfg) {
  return Energy::picojoules(static_cast<std::int64_t>(
      std::llround(static_cast<double>(view.energy_initial(n).pj()) * cfg.e_threshold_fraction)));
}

template <NetworkView V>
double energy_fraction(const V& view, NodeId n) {
  const auto init = view.energy_initial(n).pj();
  if (init <= 0) return 0.0;
  return static_cast<double>(view.energy_residual(n).pj()) / static_cast<double>(init);
}

/// Speed-admissible, reliability- and energy-gated two-hop candidates of node
/// i, in (j, k) order, with all metric inputs filled in but unscored.
template <NetworkView V>
std::vector<Candidate> admissible_candidates(NodeId i, const DeadlineState& ds, const NeighborTables& tables,
                                             const V& view, const MetricConfig& cfg) {
  std::vector<Candidate> out;
  const auto heights = view.heights();
  const double need = required_speed(static_cast<double>(ds.h_i), ds.rt);
  for (const auto& [j, k] : two_hop_forwarders(tables, heights)) {
    if (j == view.sink() || !view.alive(j) || !view.alive(k)) continue;
    const double speed = two_hop_speed(static_cast<double>(ds.h_i), static_cast<double>(*heights[k]),
                                       view.ed(i, j), view.ed(j, k));
    if (!(speed > 0.0) || speed < need) continue;
    if (view.psucc(i, j) < cfg.reliability_gate || view.psucc(j, k) < cfg.reliability_gate) continue;
    if (view.energy_residual(k) < energy_threshold(view, k, cfg)) continue;
    Candidate c;
    c.j = j;
    c.k = k;
    c.speed = speed;
    c.mtx_ij = view.mtx(i, j);
    c.mtx_jk = view.mtx(j, k);
    c.energy_frac = energy_fraction(view, k);
    out.push_back(c);
  }
  return out;
}

/// Nearer-to-sink neighbour with the most residual energy, above E_th. Only
/// the speed constraint is relaxed: neighbours whose link clears the
/// reliability gate are preferred, and the gate is dropped only when none does.
template <NetworkView V>
std::optional<NodeId> fallback_forwarder(NodeId i, const NeighborTables& tables, const V& view,
                                         const MetricConfig& cfg) {
  const auto heights = view.heights();
  std::optional<NodeId> best;
  std::optional<NodeId> best_reliable;
  auto better = [&](const std::optional<NodeId>& cur, NodeId j) {
    return !cur || view.energy_residual(j) > view.energy_residual(*cur);
  };
  for (NodeId j : one_hop_forwarders(tables, heights)) {
    if (!view.alive(j) || view.energy_residual(j) < energy_threshold(view, j, cfg)) continue;
    if (better(best, j)) best = j;
    if (view.psucc(i, j) >= cfg.reliability_gate && better(best_reliable, j)) best_reliable = j;
  }
  return best_reliable ? best_reliable : best;
}

/// RRDVCR next-hop choice for a packet held by node i.
template <NetworkView V>
Decision select_forwarder(NodeId i, const DeadlineState& ds, const NeighborTables& tables, const V& view,
                          const MetricConfig& cfg) {
  if (!(ds.rt > 0.0)) return Drop{DropReason::DeadlineMissed};
  const NodeId sink = view.sink();
  // A one-hop sink is taken directly when that link clears the reliability gate.
  if (std::binary_search(tables.n1.begin(), tables.n1.end(), sink) && view.alive(sink) &&
      view.psucc(i, sink) >= cfg.reliability_gate) {
    return Forward{sink, sink, 0.0};
  }
  if (!view.heights()[i]) return Drop{DropReason::NoRoute};

  auto candidates = admissible_candidates(i, ds, tables, view, cfg);
  if (!candidates.empty()) {
    const double f = cfg.fixed_f ? *cfg.fixed_f
                                 : f_rt(std::min(ds.rt, ds.d_req), ds.d_req, static_cast<double>(ds.h_i),
                                        static_cast<double>(std::max<std::uint32_t>(ds.h_s, 1)), cfg.f_mode);
    const auto scored = rrdvcr_metric(std::move(candidates), f, cfg.mtx_term_mode);
    const auto& best = best_candidate(scored);
    return Forward{best.j, best.k, best.score};
  }
  if (auto j = fallback_forwarder(i, tables, view, cfg)) return FallbackForward{*j};
  return Drop{DropReason::NoRoute};
}

/// Post-hoc check of a Forward decision against the speed, reliability and
/// energy constraints. Direct delivery to the sink only needs the reliability gate.
template <NetworkView V>
bool satisfies_constraints(NodeId i, const Forward& fwd, const DeadlineState& ds, const V& view,
                           const MetricConfig& cfg) {
  if (fwd.j == view.sink()) return fwd.k == fwd.j && view.psucc(i, fwd.j) >= cfg.reliability_gate;
  const auto heights = view.heights();
  if (!heights[fwd.k] || !heights[i] || *heights[fwd.k] >= *heights[i]) return false;
  const double speed = two_hop_speed(static_cast<double>(ds.h_i), static_cast<double>(*heights[fwd.k]),
                                     view.ed(i, fwd.j), view.ed(fwd.j, fwd.k));
  if (speed < required_speed(static_cast<double>(ds.h_i), ds.rt)) return false;
  if (view.psucc(i, fwd.j) < cfg.reliability_gate || view.psucc(fwd.j, fwd.k) < cfg.reliability_gate) {
    return false;
  }
  return view.energy_residual(fwd.k) >= energy_threshold(view, fwd.k, cfg);
}

} // namespace rrdvcr
