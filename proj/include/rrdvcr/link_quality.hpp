#pragma once

#include "rrdvcr/rng.hpp"
#include "rrdvcr/topology.hpp"
#include "rrdvcr/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace rrdvcr {

inline constexpr double kInfiniteEtx = std::numeric_limits<double>::infinity();

namespace detail {
inline void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}
} // namespace detail

/// Probability that a data frame arrives and its ack makes it back.
inline double psucc(double d_r, double d_f) {
  detail::require_probability(d_r, "d_r");
  detail::require_probability(d_f, "d_f");
  return d_r * d_f;
}

/// Expected transmissions; a dead link yields kInfiniteEtx.
inline double etx(double p) {
  detail::require_probability(p, "success probability");
  if (p == 0.0) return kInfiniteEtx;
  return 1.0 / p;
}

/// Lowest success probability the MAC retry budget can still absorb.
inline double pl_min(int max_retry) {
  if (max_retry < 1) throw std::invalid_argument("max_retry must be >= 1");
  return 1.0 / static_cast<double>(max_retry);
}

/// ETX clamped at the MAC retry cap.
inline double mtx(double cur_psucc, int max_retry) {
  detail::require_probability(cur_psucc, "cur_psucc");
  const double floor_p = pl_min(max_retry);
  if (cur_psucc >= floor_p) return 1.0 / cur_psucc;
  return static_cast<double>(max_retry);
}

struct LinkQualityConfig {
  int max_retry = 7;
  std::size_t window_size = 20;
  double ed_smoothing = 0.2;

  void validate() const {
    if (max_retry < 1) throw std::invalid_argument("max_retry must be >= 1");
    if (window_size < 1) throw std::invalid_argument("window_size must be >= 1");
    if (!(ed_smoothing > 0.0 && ed_smoothing <= 1.0)) {
      throw std::invalid_argument("ed_smoothing must lie in (0,1]");
    }
  }
};

/// Per directed link i->j. d_f is the i->j frame delivery ratio, d_r the
/// j->i ack delivery ratio.
struct LinkStats {
  double d_f = 1.0;
  double d_r = 1.0;
  double cur_psucc = 1.0;
  std::size_t window_size = 20;
  std::deque<bool> window;
  std::size_t successes = 0;
  /// EWMA of whole-hop media latency (retries included), seconds.
  double ed = 0.0;

  // Values published on the last update tick; forwarding decisions read these.
  double mtx_cached = 1.0;
  double psucc_cached = 1.0;
  double ed_cached = 0.0;

  double true_psucc() const { return psucc(d_r, d_f); }
};

inline LinkStats record_outcome(LinkStats stats, bool success) {
  stats.window.push_back(success);
  if (success) ++stats.successes;
  while (stats.window.size() > stats.window_size) {
    if (stats.window.front()) --stats.successes;
    stats.window.pop_front();
  }
  stats.cur_psucc = static_cast<double>(stats.successes) / static_cast<double>(stats.window.size());
  return stats;
}

/// Fills the window with round(p * W) successes spread evenly, so cur_psucc
/// starts at the ground truth and old samples age out uniformly.
inline LinkStats seed_window(LinkStats stats, double p) {
  detail::require_probability(p, "seed probability");
  stats.window.clear();
  stats.successes = 0;
  const auto w = stats.window_size;
  const auto target = static_cast<std::size_t>(std::llround(p * static_cast<double>(w)));
  for (std::size_t k = 0; k < w; ++k) {
    const bool s = ((k + 1) * target) / w > (k * target) / w;
    stats = record_outcome(std::move(stats), s);
  }
  return stats;
}

inline LinkStats record_latency(LinkStats stats, double sample, double alpha) {
  stats.ed = (1.0 - alpha) * stats.ed + alpha * sample;
  return stats;
}

inline void publish(LinkStats& stats, int max_retry) {
  stats.psucc_cached = stats.cur_psucc;
  stats.mtx_cached = mtx(stats.cur_psucc, max_retry);
  stats.ed_cached = stats.ed;
}

/// Ground-truth delivery ratio for one direction of a link:
/// clamp(1 - edge_loss * (d/range)^k * u, p_min, 1), u ~ U(1 - spread, 1 + spread)
/// drawn per direction. spread = 0 gives a pure distance curve.
struct ChannelModel {
  double exponent = 4.0;
  double edge_loss = 0.3;
  double p_min = 0.05;
  double spread = 1.0;

  void validate() const {
    if (!(exponent > 0.0)) throw std::invalid_argument("channel exponent must be positive");
    if (!(edge_loss >= 0.0)) throw std::invalid_argument("channel edge_loss must be non-negative");
    detail::require_probability(p_min, "p_min");
    if (!(spread >= 0.0 && spread <= 1.0)) throw std::invalid_argument("channel spread must lie in [0,1]");
  }

  double delivery(double dist, double range, double u = 1.0) const {
    const double loss = edge_loss * std::pow(dist / range, exponent) * u;
    return std::clamp(1.0 - loss, p_min, 1.0);
  }
};

class LinkTable {
public:
  LinkTable() = default;

  LinkTable(const Topology& topology, const ChannelModel& channel, const LinkQualityConfig& cfg,
            double initial_ed, std::uint64_t seed) {
    channel.validate();
    cfg.validate();
    Rng rng = make_stream(seed, streams::kChannel);
    // One draw per direction, visited in (i, j) order for reproducibility.
    std::unordered_map<std::uint64_t, double> ratio;
    for (const auto& n : topology.nodes) {
      for (NodeId m : topology.adjacency[n.id]) {
        const double u = channel.spread > 0.0 ? uniform(rng, 1.0 - channel.spread, 1.0 + channel.spread) : 1.0;
        ratio[key(n.id, m)] = channel.delivery(distance(n.pos, topology.nodes[m].pos), topology.radio_range, u);
      }
    }
    for (const auto& n : topology.nodes) {
      for (NodeId m : topology.adjacency[n.id]) {
        LinkStats s;
        s.d_f = ratio.at(key(n.id, m));
        s.d_r = ratio.at(key(m, n.id));
        s.window_size = cfg.window_size;
        s = seed_window(std::move(s), s.true_psucc());
        s.ed = initial_ed;
        publish(s, cfg.max_retry);
        m_links.emplace(key(n.id, m), std::move(s));
      }
    }
  }

  bool contains(NodeId from, NodeId to) const { return m_links.count(key(from, to)) != 0; }

  const LinkStats& at(NodeId from, NodeId to) const { return m_links.at(key(from, to)); }
  LinkStats& at(NodeId from, NodeId to) { return m_links.at(key(from, to)); }

  void publish_all(int max_retry) {
    for (auto& [k, s] : m_links) publish(s, max_retry);
  }

  std::size_t size() const { return m_links.size(); }

private:
  static std::uint64_t key(NodeId from, NodeId to) {
    return (static_cast<std::uint64_t>(from) << 32) | to;
  }
  std::unordered_map<std::uint64_t, LinkStats> m_links;
};

} // namespace rrdvcr
