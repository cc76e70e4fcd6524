#pragma once

#include "rrdvcr/link_quality.hpp"
#include "rrdvcr/rng.hpp"
#include "rrdvcr/topology.hpp"
#include "rrdvcr/types.hpp"

#include <stdexcept>
#include <vector>

namespace rrdvcr {

/// Single-attempt media access timing. Propagation delay is ignored.
struct MediaDelayParams {
  double t_boff_max = 0.2;    // uniform back-off upper bound, s
  double bitrate = 38400.0;   // bit/s
  double t_sifs = 0.0002;     // s
  double t_ack = 0.0025;      // s

  void validate() const {
    if (t_boff_max < 0.0 || t_sifs < 0.0 || t_ack < 0.0) {
      throw std::invalid_argument("media delay durations must be non-negative");
    }
    if (!(bitrate > 0.0)) throw std::invalid_argument("bitrate must be positive");
  }

  double t_data(double bits) const { return bits / bitrate; }
};

/// Expected latency of one attempt for the candidate at `candidate_index`
/// in the responder order: mean back-off + frame time + index * (SIFS + ack).
inline double estimate_ed(const MediaDelayParams& params, double packet_bits, unsigned candidate_index) {
  return params.t_boff_max / 2.0 + params.t_data(packet_bits) +
         static_cast<double>(candidate_index) * (params.t_sifs + params.t_ack);
}

/// Radio energy costs. Defaults approximate a Mica2/MPR400 at 3 V, 38.4 kbit/s.
struct EnergyModel {
  double tx_per_bit = 2.1e-6;      // J/bit
  double rx_per_bit = 0.78e-6;     // J/bit
  double idle_per_second = 0.0;    // J/s, not charged by the simulator
  std::uint32_t control_packet_bits = 160;

  void validate() const {
    if (tx_per_bit < 0.0 || rx_per_bit < 0.0 || idle_per_second < 0.0) {
      throw std::invalid_argument("energy costs must be non-negative");
    }
  }
};

enum class Direction { Tx, Rx };

inline Energy radio_cost(double bits, Direction dir, const EnergyModel& model) {
  const Energy per_bit = Energy::joules(dir == Direction::Tx ? model.tx_per_bit : model.rx_per_bit);
  return per_bit * static_cast<std::int64_t>(std::llround(bits));
}

/// Debits a radio operation. The residual never goes negative; a node that
/// reaches zero is dead.
inline NodeState charge(NodeState node, double bits, Direction dir, const EnergyModel& model) {
  if (!node.alive) return node;
  const Energy cost = radio_cost(bits, dir, model);
  if (cost >= node.energy_residual) {
    node.energy_residual = Energy{};
  } else {
    node.energy_residual -= cost;
  }
  if (node.energy_residual <= Energy{}) node.alive = false;
  return node;
}

struct ChargeRecord {
  NodeId node = kNoNode;
  Direction dir = Direction::Tx;
  Energy amount;
  double at = 0.0; // offset from hop start, s
};

struct HopOutcome {
  bool delivered = false;
  int attempts = 0;
  double elapsed = 0.0;
  std::vector<ChargeRecord> charges;

  Energy spent() const {
    Energy e;
    for (const auto& c : charges) e += c.amount;
    return e;
  }
};

struct HopRequest {
  double true_p = 1.0;
  int max_retry = 7;
  double bits = 1200.0;
  unsigned candidate_index = 1;
  double ed_smoothing = 0.2;
};

/// Up to max_retry Bernoulli(true_p) attempts. Each attempt costs one back-off,
/// one frame and one ack slot; the sender pays tx every time, the receiver pays
/// rx when the frame gets through. Every outcome feeds the link window; the
/// whole hop latency, retries included, is one ed sample.
inline HopOutcome attempt_hop(LinkStats& link, NodeState& sender, NodeState& receiver,
                              const HopRequest& req, const MediaDelayParams& params,
                              const EnergyModel& model, Rng& rng) {
  if (req.max_retry < 1) throw std::invalid_argument("max_retry must be >= 1");
  HopOutcome out;
  const double fixed = params.t_data(req.bits) + req.candidate_index * (params.t_sifs + params.t_ack);
  while (out.attempts < req.max_retry && sender.alive) {
    ++out.attempts;
    const double slot = (params.t_boff_max > 0.0 ? uniform(rng, 0.0, params.t_boff_max) : 0.0) + fixed;

    const Energy before_tx = sender.energy_residual;
    sender = charge(sender, req.bits, Direction::Tx, model);
    out.charges.push_back({sender.id, Direction::Tx, before_tx - sender.energy_residual, out.elapsed});

    const bool ok = receiver.alive && bernoulli(rng, req.true_p);
    out.elapsed += slot;
    link = record_outcome(std::move(link), ok);
    if (ok) {
      const Energy before_rx = receiver.energy_residual;
      receiver = charge(receiver, req.bits, Direction::Rx, model);
      out.charges.push_back({receiver.id, Direction::Rx, before_rx - receiver.energy_residual, out.elapsed});
      out.delivered = true;
      break;
    }
  }
  if (out.attempts > 0) link = record_latency(std::move(link), out.elapsed, req.ed_smoothing);
  return out;
}

} // namespace rrdvcr
