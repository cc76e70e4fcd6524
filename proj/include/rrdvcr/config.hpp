#pragma once

#include "rrdvcr/scenario.hpp"
#include "rrdvcr/sim_engine.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace rrdvcr {

/// Raised for malformed or out-of-range configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// --- ScenarioConfig <-> JSON --------------------------------------------------

inline nlohmann::json to_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["deployment"] = to_string(c.deployment);
  j["field_width"] = c.field_width;
  j["field_height"] = c.field_height;
  j["density"] = c.density;
  j["radio_range"] = c.radio_range;
  j["corridor_nodes"] = c.corridor_nodes;
  j["corridor_spacing"] = c.corridor_spacing;
  j["corridor_width"] = c.corridor_width;
  j["source_pos"] = {c.source_pos.x, c.source_pos.y};
  j["sink_pos"] = {c.sink_pos.x, c.sink_pos.y};
  j["source_region_radius"] = c.source_region_radius;
  j["sources"] = c.sources;
  j["deadline_ms"] = c.deadline_ms;
  j["sim_time"] = c.sim_time;
  j["start_time"] = c.start_time;
  j["cbr_interval"] = c.cbr_interval;
  j["packet_bytes"] = c.packet_bytes;
  j["update_interval"] = c.update_interval;
  j["initial_energy"] = c.initial_energy;
  j["congestion_penalty"] = c.congestion_penalty;
  j["failure_prob_max"] = c.failure_prob_max;
  j["failure_tolerance"] = c.failure_tolerance;
  j["metric"] = {{"mtx_term_mode", to_string(c.metric.mtx_term_mode)},
                 {"f_mode", to_string(c.metric.f_mode)},
                 {"fixed_f", c.metric.fixed_f ? nlohmann::json(*c.metric.fixed_f) : nlohmann::json(nullptr)},
                 {"beta", c.metric.beta},
                 {"reliability_gate", c.metric.reliability_gate},
                 {"adv_gate", c.metric.adv_gate},
                 {"e_threshold_fraction", c.metric.e_threshold_fraction}};
  j["link"] = {{"max_retry", c.link.max_retry},
               {"window_size", c.link.window_size},
               {"ed_smoothing", c.link.ed_smoothing}};
  j["channel"] = {{"exponent", c.channel.exponent}, {"edge_loss", c.channel.edge_loss}, {"p_min", c.channel.p_min}, {"spread", c.channel.spread}};
  j["mac"] = {{"t_boff_max", c.mac.t_boff_max},
              {"bitrate", c.mac.bitrate},
              {"t_sifs", c.mac.t_sifs},
              {"t_ack", c.mac.t_ack}};
  j["energy"] = {{"tx_per_bit", c.energy.tx_per_bit},
                 {"rx_per_bit", c.energy.rx_per_bit},
                 {"idle_per_second", c.energy.idle_per_second},
                 {"control_packet_bits", c.energy.control_packet_bits}};
  return j;
}

namespace detail {

// Reads keys present in `src` into the fields of `dst`; unknown keys are errors.
class Reader {
public:
  Reader(const nlohmann::json& src, std::string where) : m_src(src), m_where(std::move(where)) {
    if (!m_src.is_object()) throw ConfigError(m_where + ": expected an object");
  }

  template <class T>
  Reader& field(const char* key, T& out) {
    m_known.insert(key);
    if (auto it = m_src.find(key); it != m_src.end()) {
      try {
        out = it->template get<T>();
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(m_where + "." + key + ": " + e.what());
      }
    }
    return *this;
  }

  template <class Fn>
  Reader& custom(const char* key, Fn&& fn) {
    m_known.insert(key);
    if (auto it = m_src.find(key); it != m_src.end()) {
      try {
        fn(*it);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(m_where + "." + key + ": " + e.what());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(m_where + "." + key + ": " + e.what());
      }
    }
    return *this;
  }

  void finish() const {
    for (auto it = m_src.begin(); it != m_src.end(); ++it) {
      if (!m_known.count(it.key())) throw ConfigError(m_where + ": unknown key '" + it.key() + "'");
    }
  }

private:
  const nlohmann::json& m_src;
  std::string m_where;
  std::set<std::string> m_known;
};

inline Position read_position(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace detail

/// Applies the keys of `j` on top of `base`.
inline ScenarioConfig scenario_from_json(const nlohmann::json& j, ScenarioConfig base = {}) {
  ScenarioConfig c = std::move(base);
  detail::Reader r(j, "config");
  r.custom("deployment", [&](const auto& v) { c.deployment = parse_deployment(v.template get<std::string>()); })
      .field("field_width", c.field_width)
      .field("field_height", c.field_height)
      .field("density", c.density)
      .field("radio_range", c.radio_range)
      .field("corridor_nodes", c.corridor_nodes)
      .field("corridor_spacing", c.corridor_spacing)
      .field("corridor_width", c.corridor_width)
      .custom("source_pos", [&](const auto& v) { c.source_pos = detail::read_position(v); })
      .custom("sink_pos", [&](const auto& v) { c.sink_pos = detail::read_position(v); })
      .field("source_region_radius", c.source_region_radius)
      .field("sources", c.sources)
      .field("deadline_ms", c.deadline_ms)
      .field("sim_time", c.sim_time)
      .field("start_time", c.start_time)
      .field("cbr_interval", c.cbr_interval)
      .field("packet_bytes", c.packet_bytes)
      .field("update_interval", c.update_interval)
      .field("initial_energy", c.initial_energy)
      .field("congestion_penalty", c.congestion_penalty)
      .field("failure_prob_max", c.failure_prob_max)
      .field("failure_tolerance", c.failure_tolerance)
      .custom("metric",
              [&](const auto& v) {
                detail::Reader m(v, "config.metric");
                m.custom("mtx_term_mode",
                         [&](const auto& s) { c.metric.mtx_term_mode = parse_mtx_mode(s.template get<std::string>()); })
                    .custom("f_mode", [&](const auto& s) { c.metric.f_mode = parse_f_mode(s.template get<std::string>()); })
                    .custom("fixed_f",
                            [&](const auto& s) {
                              if (s.is_null()) {
                                c.metric.fixed_f.reset();
                              } else {
                                c.metric.fixed_f = s.template get<double>();
                              }
                            })
                    .field("beta", c.metric.beta)
                    .field("reliability_gate", c.metric.reliability_gate)
                    .field("adv_gate", c.metric.adv_gate)
                    .field("e_threshold_fraction", c.metric.e_threshold_fraction)
                    .finish();
              })
      .custom("link",
              [&](const auto& v) {
                detail::Reader m(v, "config.link");
                m.field("max_retry", c.link.max_retry)
                    .field("window_size", c.link.window_size)
                    .field("ed_smoothing", c.link.ed_smoothing)
                    .finish();
              })
      .custom("channel",
              [&](const auto& v) {
                detail::Reader m(v, "config.channel");
                m.field("exponent", c.channel.exponent)
                    .field("edge_loss", c.channel.edge_loss)
                    .field("p_min", c.channel.p_min)
                    .field("spread", c.channel.spread)
                    .finish();
              })
      .custom("mac",
              [&](const auto& v) {
                detail::Reader m(v, "config.mac");
                m.field("t_boff_max", c.mac.t_boff_max)
                    .field("bitrate", c.mac.bitrate)
                    .field("t_sifs", c.mac.t_sifs)
                    .field("t_ack", c.mac.t_ack)
                    .finish();
              })
      .custom("energy",
              [&](const auto& v) {
                detail::Reader m(v, "config.energy");
                m.field("tx_per_bit", c.energy.tx_per_bit)
                    .field("rx_per_bit", c.energy.rx_per_bit)
                    .field("idle_per_second", c.energy.idle_per_second)
                    .field("control_packet_bits", c.energy.control_packet_bits)
                    .finish();
              });
  r.finish();
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

// --- sweeps -----------------------------------------------------------------

/// A scenario plus the axes to sweep. The file form is the scenario object
/// with an optional "sweep" member.
struct SweepConfig {
  ScenarioConfig scenario;
  std::vector<Protocol> protocols{Protocol::Rrdvcr, Protocol::Thvr, Protocol::Speed};
  std::vector<double> deadlines_ms{900, 1000, 1100, 1200, 1300, 1400, 1500, 1600, 1700, 1800};
  std::vector<std::uint32_t> source_counts{1};
  std::vector<std::uint64_t> seeds{1};
};

inline nlohmann::json to_json(const SweepConfig& s) {
  nlohmann::json j = to_json(s.scenario);
  std::vector<std::string> protocols;
  for (auto p : s.protocols) protocols.push_back(to_string(p));
  j["sweep"] = {{"protocols", protocols},
                {"deadlines_ms", s.deadlines_ms},
                {"sources", s.source_counts},
                {"seeds", s.seeds}};
  return j;
}

inline SweepConfig sweep_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected an object");
  SweepConfig s;
  nlohmann::json scenario = j;
  if (auto it = j.find("sweep"); it != j.end()) {
    detail::Reader r(*it, "config.sweep");
    r.custom("protocols",
             [&](const auto& v) {
               s.protocols.clear();
               for (const auto& p : v) s.protocols.push_back(parse_protocol(p.template get<std::string>()));
             })
        .field("deadlines_ms", s.deadlines_ms)
        .field("sources", s.source_counts)
        .field("seeds", s.seeds)
        .finish();
    scenario.erase("sweep");
  }
  s.scenario = scenario_from_json(scenario);
  if (s.protocols.empty() || s.deadlines_ms.empty() || s.source_counts.empty() || s.seeds.empty()) {
    throw ConfigError("config.sweep: every axis needs at least one value");
  }
  return s;
}

struct RunKey {
  Protocol protocol = Protocol::Rrdvcr;
  double deadline_ms = 0.0;
  std::uint32_t sources = 1;
  std::uint64_t seed = 0;
  std::uint32_t nodes = 0; // corridor size for hop experiments, 0 otherwise
};

struct RunRow {
  RunKey key;
  RunMetrics metrics;
};

/// Runs every job on `jobs` worker threads; results keep job order.
template <class Job>
std::vector<RunRow> run_parallel(const std::vector<Job>& work, unsigned jobs) {
  std::vector<RunRow> rows(work.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= work.size()) return;
      try {
        rows[idx] = work[idx]();
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  jobs = std::max(1u, jobs);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

/// Cross product protocols x deadlines x sources x seeds, in that nesting.
inline std::vector<RunRow> run_sweep(const SweepConfig& sweep, unsigned jobs = 1) {
  std::vector<std::function<RunRow()>> work;
  for (auto protocol : sweep.protocols) {
    for (double deadline : sweep.deadlines_ms) {
      for (auto sources : sweep.source_counts) {
        for (auto seed : sweep.seeds) {
          work.emplace_back([&sweep, protocol, deadline, sources, seed] {
            ScenarioConfig cfg = sweep.scenario;
            cfg.deadline_ms = deadline;
            cfg.sources = sources;
            return RunRow{{protocol, deadline, sources, seed, 0}, run_scenario(cfg, protocol, seed).metrics};
          });
        }
      }
    }
  }
  return run_parallel(work, jobs);
}

/// Hop-count comparison over corridor deployments of the given sizes.
/// Default deadline for the corridor hop-count runs: loose enough that path
/// length, not deadline pressure, decides which packets arrive.
inline constexpr double kHopsExperimentDeadlineMs = 10000.0;

inline std::vector<RunRow> run_hops_experiment(const ScenarioConfig& base, const std::vector<std::uint32_t>& sizes,
                                               const std::vector<Protocol>& protocols,
                                               const std::vector<std::uint64_t>& seeds, unsigned jobs = 1) {
  std::vector<std::function<RunRow()>> work;
  for (auto protocol : protocols) {
    for (auto n : sizes) {
      for (auto seed : seeds) {
        work.emplace_back([&base, protocol, n, seed] {
          ScenarioConfig cfg = base;
          cfg.deployment = Deployment::Corridor;
          cfg.corridor_nodes = n;
          cfg.sources = 1;
          return RunRow{{protocol, cfg.deadline_ms, 1, seed, n}, run_scenario(cfg, protocol, seed).metrics};
        });
      }
    }
  }
  return run_parallel(work, jobs);
}

// --- CSV --------------------------------------------------------------------

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline constexpr const char* kRunCsvHeader =
    "protocol,deadline_ms,sources,seed,pdmr,ecpp_mJ,mean_delay_ms,worst_delay_ms,mean_hops,control_packets";

inline void write_runs_csv(std::ostream& os, const std::vector<RunRow>& rows) {
  os << kRunCsvHeader << '\n';
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    os << to_string(r.key.protocol) << ',' << format_number(r.key.deadline_ms) << ',' << r.key.sources << ','
       << r.key.seed << ',' << format_number(m.pdmr) << ',' << format_number(m.ecpp_mj) << ','
       << format_number(m.mean_delay * 1000.0) << ',' << format_number(m.worst_delay * 1000.0) << ','
       << format_number(m.mean_hops) << ',' << m.control_packets << '\n';
  }
}

struct CellSummary {
  Protocol protocol = Protocol::Rrdvcr;
  double deadline_ms = 0.0;
  std::uint32_t sources = 1;
  std::uint32_t nodes = 0;
  std::size_t runs = 0;
  double pdmr = 0.0;
  double ecpp_mj = 0.0;
  double mean_delay_ms = 0.0;
  double worst_delay_ms = 0.0;
  double mean_hops = 0.0;
  double control_packets = 0.0;
};

/// Per-cell means over seeds, cells in first-appearance order.
inline std::vector<CellSummary> summarize(const std::vector<RunRow>& rows) {
  std::vector<CellSummary> cells;
  auto same = [](const CellSummary& c, const RunKey& k) {
    return c.protocol == k.protocol && c.deadline_ms == k.deadline_ms && c.sources == k.sources && c.nodes == k.nodes;
  };
  for (const auto& r : rows) {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const auto& c) { return same(c, r.key); });
    if (it == cells.end()) {
      CellSummary c;
      c.protocol = r.key.protocol;
      c.deadline_ms = r.key.deadline_ms;
      c.sources = r.key.sources;
      c.nodes = r.key.nodes;
      cells.push_back(c);
      it = std::prev(cells.end());
    }
    const auto& m = r.metrics;
    ++it->runs;
    it->pdmr += m.pdmr;
    it->ecpp_mj += m.ecpp_mj;
    it->mean_delay_ms += m.mean_delay * 1000.0;
    it->worst_delay_ms += m.worst_delay * 1000.0;
    it->mean_hops += m.mean_hops;
    it->control_packets += static_cast<double>(m.control_packets);
  }
  for (auto& c : cells) {
    const double n = static_cast<double>(c.runs);
    c.pdmr /= n;
    c.ecpp_mj /= n;
    c.mean_delay_ms /= n;
    c.worst_delay_ms /= n;
    c.mean_hops /= n;
    c.control_packets /= n;
  }
  return cells;
}

inline void write_summary_csv(std::ostream& os, const std::vector<CellSummary>& cells) {
  os << "protocol,deadline_ms,sources,nodes,runs,pdmr,ecpp_mJ,mean_delay_ms,worst_delay_ms,mean_hops,control_packets\n";
  for (const auto& c : cells) {
    os << to_string(c.protocol) << ',' << format_number(c.deadline_ms) << ',' << c.sources << ',' << c.nodes << ','
       << c.runs << ',' << format_number(c.pdmr) << ',' << format_number(c.ecpp_mj) << ','
       << format_number(c.mean_delay_ms) << ',' << format_number(c.worst_delay_ms) << ','
       << format_number(c.mean_hops) << ',' << format_number(c.control_packets) << '\n';
  }
}

inline void write_hops_csv(std::ostream& os, const std::vector<RunRow>& rows) {
  os << "protocol,nodes,seed,mean_hops,pdmr,delivered\n";
  for (const auto& r : rows) {
    os << to_string(r.key.protocol) << ',' << r.key.nodes << ',' << r.key.seed << ','
       << format_number(r.metrics.mean_hops) << ',' << format_number(r.metrics.pdmr) << ','
       << r.metrics.delivered << '\n';
  }
}

} // namespace rrdvcr
