// Command-line driver: runs protocol sweeps and writes CSV tables.

#include "rrdvcr/config.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace rrdvcr;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    T v{};
    if constexpr (std::is_floating_point_v<T>) {
      v = static_cast<T>(std::stod(s, &used));
    } else {
      v = static_cast<T>(std::stoull(s, &used));
    }
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("bad ") + what + " '" + s + "'");
  }
}

template <class T>
std::vector<T> parse_list(const std::vector<std::string>& items, const char* what) {
  std::vector<T> out;
  for (const auto& raw : items) {
    for (const auto& s : split(raw, ',')) out.push_back(parse_number<T>(s, what));
  }
  return out;
}

// "1..20", "1,4,9" or a mix such as "1..3,10".
std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split(spec, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_number<std::uint64_t>(part, "seed"));
      continue;
    }
    const auto lo = parse_number<std::uint64_t>(part.substr(0, dots), "seed");
    const auto hi = parse_number<std::uint64_t>(part.substr(dots + 2), "seed");
    if (hi < lo) throw ConfigError("empty seed range '" + part + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw ConfigError("no seeds given");
  return out;
}

// key.path=value with value parsed as JSON (bare words are taken as strings).
void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  std::string pointer;
  for (const auto& part : split(assignment.substr(0, eq), '.')) pointer += "/" + part;
  const std::string raw = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  doc[nlohmann::json::json_pointer(pointer)] = value;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

void print_summary(std::ostream& os, const std::vector<CellSummary>& cells, bool hops) {
  char line[256];
  if (hops) {
    std::snprintf(line, sizeof line, "%-8s %6s %5s %9s %8s\n", "protocol", "nodes", "runs", "mean_hops", "pdmr");
    os << line;
    for (const auto& c : cells) {
      std::snprintf(line, sizeof line, "%-8s %6u %5zu %9.3f %8.4f\n", to_string(c.protocol).c_str(), c.nodes, c.runs,
                    c.mean_hops, c.pdmr);
      os << line;
    }
    return;
  }
  std::snprintf(line, sizeof line, "%-8s %8s %7s %5s %8s %9s %10s %10s %9s %10s\n", "protocol", "deadline", "sources",
                "runs", "pdmr", "ecpp_mJ", "mean_ms", "worst_ms", "mean_hops", "control");
  os << line;
  for (const auto& c : cells) {
    std::snprintf(line, sizeof line, "%-8s %8.0f %7u %5zu %8.4f %9.3f %10.2f %10.2f %9.3f %10.1f\n",
                  to_string(c.protocol).c_str(), c.deadline_ms, c.sources, c.runs, c.pdmr, c.ecpp_mj,
                  c.mean_delay_ms, c.worst_delay_ms, c.mean_hops, c.control_packets);
    os << line;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-time WSN routing simulator: RRDVCR with THVR- and SPEED-style baselines"};

  std::string config_path;
  std::vector<std::string> protocols;
  std::vector<std::string> deadlines;
  std::vector<std::string> sources;
  std::string seeds;
  std::string f_mode;
  std::string mtx_mode;
  std::optional<double> fixed_f;
  std::optional<double> failure_prob;
  std::vector<std::string> overrides;
  std::string out_dir;
  unsigned jobs = 1;
  std::vector<std::string> hop_sizes;
  bool keep_trace = false;
  bool dump_config = false;
  std::optional<std::uint64_t> dump_topology;
  bool quiet = false;

  app.add_option("--config", config_path, "JSON scenario file (defaults apply to missing keys)");
  app.add_option("--protocol,--protocols", protocols, "rrdvcr, thvr, speed (comma list)");
  app.add_option("--deadline-ms", deadlines, "end-to-end deadlines in ms (comma list)");
  app.add_option("--sources", sources, "source counts (comma list)");
  app.add_option("--seeds", seeds, "seed list or range, e.g. 1..20");
  app.add_option("--f-mode", f_mode, "paper or monotone");
  app.add_option("--mtx-mode", mtx_mode, "reliability, literal or off");
  app.add_option("--fixed-f", fixed_f, "pin the correlation factor to a constant in [0,1]");
  app.add_option("--failure-prob", failure_prob, "maximum per-node failure probability");
  app.add_option("--set", overrides, "override a config key, e.g. --set channel.exponent=3");
  app.add_option("--out", out_dir, "directory for CSV output");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--hops-experiment", hop_sizes, "corridor sizes for the hop-count comparison (comma list); deadline defaults to 10000 ms");
  app.add_flag("--trace", keep_trace, "write per-run event traces and metrics (needs --out)");
  app.add_flag("--dump-config", dump_config, "print the effective configuration as JSON and exit");
  app.add_option("--dump-topology", dump_topology, "print the deployment for this seed as JSON and exit");
  app.add_flag("-q,--quiet", quiet, "do not print the summary table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  SweepConfig sweep;
  std::vector<std::uint32_t> sizes;
  try {
    nlohmann::json doc = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw ConfigError("cannot read " + config_path);
      doc = nlohmann::json::parse(is, nullptr, false);
      if (doc.is_discarded()) throw ConfigError(config_path + ": not valid JSON");
    }
    for (const auto& o : overrides) apply_override(doc, o);
    sweep = sweep_from_json(doc);

    if (!protocols.empty()) {
      sweep.protocols.clear();
      for (const auto& raw : protocols) {
        for (const auto& p : split(raw, ',')) sweep.protocols.push_back(parse_protocol(p));
      }
    }
    if (!deadlines.empty()) sweep.deadlines_ms = parse_list<double>(deadlines, "deadline");
    if (!sources.empty()) sweep.source_counts = parse_list<std::uint32_t>(sources, "source count");
    if (!seeds.empty()) sweep.seeds = parse_seeds(seeds);
    if (!f_mode.empty()) sweep.scenario.metric.f_mode = parse_f_mode(f_mode);
    if (!mtx_mode.empty()) sweep.scenario.metric.mtx_term_mode = parse_mtx_mode(mtx_mode);
    if (fixed_f) sweep.scenario.metric.fixed_f = *fixed_f;
    if (failure_prob) sweep.scenario.failure_prob_max = *failure_prob;
    if (!hop_sizes.empty()) sizes = parse_list<std::uint32_t>(hop_sizes, "network size");
    for (auto n : sizes) {
      if (n < 2) throw ConfigError("network sizes must be >= 2");
    }
    for (auto d : sweep.deadlines_ms) {
      if (d < 0.0) throw ConfigError("deadlines must be non-negative");
    }
    for (auto s : sweep.source_counts) {
      if (s < 1) throw ConfigError("source counts must be >= 1");
    }
    sweep.scenario.validate();
    if (keep_trace && out_dir.empty()) throw ConfigError("--trace needs --out");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (dump_config) {
      std::cout << to_json(sweep).dump(2) << '\n';
      return 0;
    }
    if (dump_topology) {
      const auto& c = sweep.scenario;
      const Energy e0 = Energy::joules(c.initial_energy);
      const Topology t = c.deployment == Deployment::Poisson
                             ? deploy_poisson(c.field_width, c.field_height, c.density, *dump_topology, c.radio_range, e0)
                             : deploy_corridor(c.corridor_nodes, c.corridor_spacing, c.corridor_width,
                                               *dump_topology, c.radio_range, e0);
      std::cout << to_json(t).dump(2) << '\n';
      return 0;
    }

    if (!out_dir.empty()) fs::create_directories(out_dir);

    if (!sizes.empty()) {
      std::vector<Protocol> ps = protocols.empty() ? std::vector<Protocol>{Protocol::Rrdvcr, Protocol::Thvr}
                                                   : sweep.protocols;
      ScenarioConfig base = sweep.scenario;
      base.deadline_ms = kHopsExperimentDeadlineMs;
      if (!deadlines.empty()) {
        if (sweep.deadlines_ms.size() != 1) throw ConfigError("--hops-experiment takes a single --deadline-ms");
        base.deadline_ms = sweep.deadlines_ms.front();
      }
      const auto rows = run_hops_experiment(base, sizes, ps, sweep.seeds, jobs);
      const auto cells = summarize(rows);
      if (!out_dir.empty()) {
        std::ostringstream a, b;
        write_hops_csv(a, rows);
        write_summary_csv(b, cells);
        write_file(fs::path(out_dir) / "hops.csv", a.str());
        write_file(fs::path(out_dir) / "hops_summary.csv", b.str());
      }
      if (!quiet) print_summary(std::cout, cells, true);
      return 0;
    }

    std::vector<RunRow> rows;
    if (keep_trace) {
      // Traces are large; runs go one at a time so each file is written as soon as it is done.
      for (auto protocol : sweep.protocols) {
        for (double deadline : sweep.deadlines_ms) {
          for (auto src : sweep.source_counts) {
            for (auto seed : sweep.seeds) {
              ScenarioConfig cfg = sweep.scenario;
              cfg.deadline_ms = deadline;
              cfg.sources = src;
              auto result = run_scenario(cfg, protocol, seed, true);
              char stem[128];
              std::snprintf(stem, sizeof stem, "%s_d%.0f_s%u_seed%llu", to_string(protocol).c_str(), deadline, src,
                            static_cast<unsigned long long>(seed));
              std::ostringstream tr;
              write_ndjson(tr, result.trace);
              write_file(fs::path(out_dir) / (std::string(stem) + ".trace.ndjson"), tr.str());
              write_file(fs::path(out_dir) / (std::string(stem) + ".metrics.json"),
                         to_json(result.metrics).dump(2) + "\n");
              rows.push_back({{protocol, deadline, src, seed, 0}, result.metrics});
            }
          }
        }
      }
    } else {
      rows = run_sweep(sweep, jobs);
    }
    const auto cells = summarize(rows);
    if (!out_dir.empty()) {
      std::ostringstream a, b;
      write_runs_csv(a, rows);
      write_summary_csv(b, cells);
      write_file(fs::path(out_dir) / "runs.csv", a.str());
      write_file(fs::path(out_dir) / "summary.csv", b.str());
    } else if (quiet) {
      write_runs_csv(std::cout, rows);
    }
    if (!quiet) print_summary(std::cout, cells, false);
    for (const auto& r : rows) {
      if (r.metrics.disconnected) {
        std::cerr << "warning: " << to_string(r.key.protocol) << " seed " << r.key.seed
                  << " has no source-sink path; its packets were dropped\n";
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
