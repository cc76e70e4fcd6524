#pragma once

#include "rrdvcr/forwarding_metric.hpp"
#include "rrdvcr/link_quality.hpp"
#include "rrdvcr/mac_energy.hpp"
#include "rrdvcr/topology.hpp"
#include "rrdvcr/types.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rrdvcr {

enum class Deployment { Poisson, Corridor };

inline std::string to_string(Deployment d) { return d == Deployment::Poisson ? "poisson" : "corridor"; }

inline Deployment parse_deployment(const std::string& s) {
  if (s == "poisson") return Deployment::Poisson;
  if (s == "corridor") return Deployment::Corridor;
  throw std::invalid_argument("unknown deployment '" + s + "'");
}

/// Everything one simulation run needs besides the protocol and the seed.
/// Defaults reproduce the 200-node, 200 m x 200 m single-flow setup.
struct ScenarioConfig {
  Deployment deployment = Deployment::Poisson;
  double field_width = 200.0;
  double field_height = 200.0;
  double density = 0.005;
  double radio_range = kDefaultRadioRange;

  // Corridor deployment: node 0 is the source end, node n-1 the sink end.
  std::uint32_t corridor_nodes = 20;
  double corridor_spacing = 12.0;
  double corridor_width = 20.0;

  Position source_pos{15.0, 25.0};
  Position sink_pos{155.0, 125.0};
  /// Extra sources are drawn uniformly from the square of this half-width
  /// around source_pos, clipped to the field.
  double source_region_radius = 25.0;
  std::uint32_t sources = 1;

  double deadline_ms = 1200.0;
  double sim_time = 300.0;
  double start_time = 1.0;
  double cbr_interval = 1.0;
  std::uint32_t packet_bytes = 150;
  double update_interval = 2.0;
  double initial_energy = 5.0;

  /// Fractional cut in link success probability per additional active source.
  double congestion_penalty = 0.03;
  double failure_prob_max = 0.0;
  double failure_tolerance = 0.5;

  MetricConfig metric;
  LinkQualityConfig link;
  ChannelModel channel;
  MediaDelayParams mac;
  EnergyModel energy;

  double packet_bits() const { return static_cast<double>(packet_bytes) * 8.0; }
  double deadline() const { return deadline_ms / 1000.0; }

  void validate() const {
    if (!(field_width > 0.0) || !(field_height > 0.0)) throw std::invalid_argument("field dimensions must be positive");
    if (!(density > 0.0)) throw std::invalid_argument("density must be positive");
    if (!(radio_range > 0.0)) throw std::invalid_argument("radio_range must be positive");
    if (deployment == Deployment::Corridor && corridor_nodes < 2) {
      throw std::invalid_argument("corridor_nodes must be >= 2");
    }
    if (sources < 1) throw std::invalid_argument("sources must be >= 1");
    if (deadline_ms < 0.0) throw std::invalid_argument("deadline_ms must be non-negative");
    if (!(sim_time > 0.0) || !(cbr_interval > 0.0) || !(update_interval > 0.0)) {
      throw std::invalid_argument("sim_time, cbr_interval and update_interval must be positive");
    }
    if (start_time < 0.0) throw std::invalid_argument("start_time must be non-negative");
    if (!(initial_energy > 0.0)) throw std::invalid_argument("initial_energy must be positive");
    if (!(source_region_radius > 0.0)) throw std::invalid_argument("source_region_radius must be positive");
    if (congestion_penalty < 0.0 || congestion_penalty > 1.0) {
      throw std::invalid_argument("congestion_penalty must lie in [0,1]");
    }
    if (failure_prob_max < 0.0 || failure_prob_max > 1.0) throw std::invalid_argument("failure_prob_max must lie in [0,1]");
    if (failure_tolerance < 0.0 || failure_tolerance > 1.0) throw std::invalid_argument("failure_tolerance must lie in [0,1]");
    metric.validate();
    link.validate();
    channel.validate();
    mac.validate();
    energy.validate();
  }
};

} // namespace rrdvcr
