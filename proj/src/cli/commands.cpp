// SPDX-License-Identifier: Apache-2.0

#include "emunoc/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "emunoc/traffic/generators.hpp"
#include "emunoc/traffic/trace.hpp"

namespace emunoc::cli {

namespace {

[[noreturn]] void rethrow_with(const std::string& key, const Error& e) {
  throw Error(e.code(), key + ": " + e.what());
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : std::string();
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::Io,
                "cannot create output dir " + dir.string() + ": " + ec.message());
  }
}

void write_bytes(const std::filesystem::path& path,
                 const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

void setup_logging() {
  auto logger = spdlog::get("emunoc");
  if (!logger) logger = spdlog::stderr_color_mt("emunoc");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("EMUNOC_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps anything unrecognised to off
    if (level == spdlog::level::off && std::string(env) != "off") {
      spdlog::warn("EMUNOC_LOG: unknown level '{}', keeping warn", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

}  // namespace

traffic::CnnMapping build_mapping(const ExperimentConfig& cfg) {
  const TrafficConfig& t = cfg.traffic;
  const unsigned nodes = cfg.noc.node_count();
  traffic::CnnMapping m;
  try {
    if (t.mapping == "snake") {
      m = traffic::snake_mapping(t.layers, cfg.noc.width, cfg.noc.height,
                                 t.neurons_per_core);
    } else if (t.mapping == "locality") {
      m = traffic::locality_mapping(t.layers, cfg.noc.width, cfg.noc.height,
                                    t.neurons_per_core);
    } else {
      m = traffic::load_mapping(t.mapping);
    }
  } catch (const Error& e) {
    rethrow_with(t.mapping == "snake" || t.mapping == "locality"
                     ? "traffic.layers"
                     : "traffic.mapping",
                 e);
  }
  if (t.mapping == "snake" || t.mapping == "locality") {
    m.framerate = t.framerate;
    m.noc_frequency = t.frequency;
  }
  try {
    traffic::validate(m, nodes);
  } catch (const Error& e) {
    rethrow_with("traffic.mapping", e);
  }
  m.cores.resize(nodes);
  return m;
}

traffic::EventList build_events(const ExperimentConfig& cfg) {
  const TrafficConfig& t = cfg.traffic;
  switch (t.kind) {
    case TrafficKind::Uniform:
      try {
        return traffic::uniform_random(cfg.noc, t.flit_rate, t.duration,
                                       cfg.noc.seed);
      } catch (const Error& e) {
        rethrow_with("traffic.flit_rate", e);
      }
    case TrafficKind::Trace: {
      traffic::Trace trace = traffic::load_trace(t.trace);
      if (trace.nodes != cfg.noc.node_count()) {
        throw Error(ErrorCode::InvalidConfig,
                    fmt::format("traffic.trace: {} declares {} nodes but the "
                                "mesh has {}",
                                t.trace.string(), trace.nodes,
                                cfg.noc.node_count()));
      }
      return std::move(trace.events);
    }
    case TrafficKind::Cnn:
      try {
        return traffic::cnn_traffic(build_mapping(cfg), t.sparsity, t.duration,
                                    cfg.noc.seed, cfg.noc.packet_len);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidRate) rethrow_with("traffic.sparsity", e);
        throw;
      }
  }
  return {};
}

Outcome run_experiment(const ExperimentConfig& cfg, transactor::FrameLog* log) {
  const traffic::EventList events = build_events(cfg);
  host::RunOptions options = cfg.run;
  options.log = log;

  Outcome out;
  out.report = host::run(cfg.noc, events, options);
  const unsigned nodes = cfg.noc.node_count();
  if (cfg.traffic.kind != TrafficKind::Trace && cfg.traffic.duration > 0) {
    std::uint64_t flits = 0;
    for (const auto& e : events) flits += e.len;
    out.offered_flit_rate =
        static_cast<double>(flits) /
        (static_cast<double>(cfg.traffic.duration) * nodes);
  }
  std::optional<double> wall;
  if (cfg.output.timing) wall = out.report.wall_seconds;
  out.summary =
      metrics::summarize(out.report.packets, out.report.cycles, wall, nodes);
  return out;
}

ExperimentConfig at_point(const ExperimentConfig& cfg, SweepVariable variable,
                          const std::string& value) {
  ExperimentConfig c = cfg;
  c.sweep.reset();
  switch (variable) {
    case SweepVariable::Sparsity:
      c.traffic.sparsity = std::stod(value);
      break;
    case SweepVariable::FlitRate:
      c.traffic.flit_rate = std::stod(value);
      break;
    case SweepVariable::MeshSize: {
      const auto n = static_cast<unsigned>(std::stoul(value));
      c.noc.width = n;
      c.noc.height = n;
      noc::validate(c.noc);
      break;
    }
  }
  return c;
}

int cmd_run(const ExperimentConfig& cfg) {
  ensure_dir(cfg.output.dir);
  transactor::FrameLog log;
  const Outcome out =
      run_experiment(cfg, cfg.output.frame_log ? &log : nullptr);
  metrics::write_report(out.summary, out.report.packets,
                        cfg.output.dir / "summary.json",
                        cfg.output.dir / "packets.csv");
  if (cfg.output.frame_log) write_bytes(cfg.output.dir / "frames.bin", log.bytes());

  const metrics::Summary& s = out.summary;
  std::cout << fmt::format(
      "packets={} delivered={} cycles={} max_latency={} mean_latency={} "
      "accepted_flit_rate={:.6f} emu_hz={}\n",
      s.packets, s.delivered, s.cycles, fmt_opt(s.max_latency),
      s.mean_latency ? fmt::format("{:.3f}", *s.mean_latency) : "",
      s.accepted_flit_rate,
      s.emu_hz ? fmt::format("{:.0f}", *s.emu_hz) : std::string("off"));
  if (out.report.safety.violations() > 0) {
    spdlog::error("clock-halter safety violations: {}",
                  out.report.safety.violations());
    return 3;
  }
  return 0;
}

int cmd_gen(const ExperimentConfig& cfg, const std::filesystem::path& out,
            const std::vector<std::string>& sparsities) {
  if (cfg.traffic.kind == TrafficKind::Trace) {
    throw Error(ErrorCode::InvalidConfig,
                "traffic.kind: gen produces uniform or cnn traffic, not trace");
  }
  const unsigned nodes = cfg.noc.node_count();
  if (sparsities.empty()) {
    if (out.has_parent_path()) ensure_dir(out.parent_path());
    traffic::save_trace({nodes, build_events(cfg)}, out);
    std::cout << out.string() << '\n';
    return 0;
  }
  if (cfg.traffic.kind != TrafficKind::Cnn) {
    throw Error(ErrorCode::InvalidConfig,
                "--sparsity-sweep: needs traffic.kind = cnn");
  }
  ensure_dir(out);
  for (const std::string& v : sparsities) {
    const ExperimentConfig point = at_point(cfg, SweepVariable::Sparsity, v);
    if (point.traffic.sparsity < 0.0 || point.traffic.sparsity > 1.0) {
      throw Error(ErrorCode::InvalidConfig,
                  "--sparsity-sweep: value " + v + " outside [0, 1]");
    }
    const auto path = out / ("cnn_sparsity_" + v + ".trace");
    traffic::save_trace({nodes, build_events(point)}, path);
    std::cout << path.string() << '\n';
  }
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  if (!cfg.sweep) {
    throw Error(ErrorCode::InvalidConfig, "sweep.variable: missing required key");
  }
  const SweepConfig& sw = *cfg.sweep;
  ensure_dir(cfg.output.dir);

  struct Row {
    std::optional<Outcome> outcome;
    std::string error;
  };
  std::vector<Row> rows(sw.values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        rows[i].outcome = run_experiment(at_point(cfg, sw.variable, sw.values[i]));
      } catch (const std::exception& e) {
        rows[i].error = e.what();
      }
    }
  };
  const unsigned jobs =
      std::min<unsigned>(sw.jobs, static_cast<unsigned>(rows.size()));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "point,max_latency,mean_latency,emu_hz,p50_latency,p99_latency,"
         "mean_head_latency,packets,delivered,offered_flit_rate,"
         "accepted_flit_rate,cycles,status,error\n";
  int failed = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv << sw.values[i] << ',';
    if (!rows[i].outcome) {
      ++failed;
      spdlog::error("{} = {}: {}", to_string(sw.variable), sw.values[i],
                    rows[i].error);
      csv << ",,,,,,,,,,,failed," << csv_quote(rows[i].error) << '\n';
      continue;
    }
    const Outcome& o = *rows[i].outcome;
    const metrics::Summary& s = o.summary;
    const bool safe = o.report.safety.violations() == 0;
    if (!safe) ++failed;
    csv << fmt_opt(s.max_latency) << ',' << fmt_opt(s.mean_latency) << ','
        << fmt_opt(s.emu_hz) << ',' << fmt_opt(s.p50_latency) << ','
        << fmt_opt(s.p99_latency) << ',' << fmt_opt(s.mean_head_latency) << ','
        << s.packets << ',' << s.delivered << ','
        << fmt_opt(o.offered_flit_rate) << ','
        << fmt::format("{}", s.accepted_flit_rate) << ',' << s.cycles << ','
        << (safe ? "ok," : "failed,\"clock-halter safety violation\"") << '\n';
  }
  const auto path = cfg.output.dir / "sweep.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string());
  out << csv.str();
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
  std::cout << fmt::format("{} points, {} failed -> {}\n", rows.size(), failed,
                           path.string());
  return failed == 0 ? 0 : 1;
}

int cmd_validate_trace(const std::filesystem::path& path) {
  const traffic::Trace trace = traffic::load_trace(path);
  traffic::validate_events(trace.events, trace.nodes, 0xFFFF);
  std::size_t deps = 0;
  for (const auto& e : trace.events) deps += e.deps.size();
  std::cout << fmt::format("{}: ok, {} nodes, {} packets, {} dependencies\n",
                           path.string(), trace.nodes, trace.events.size(),
                           deps);
  return 0;
}

int main_entry(int argc, char** argv) {
  setup_logging();

  CLI::App app{"emunoc: cycle-accurate hybrid NoC emulation"};
  app.require_subcommand(1);

  std::optional<std::filesystem::path> config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<Cycle> max_cycle;
  std::optional<std::string> out_dir;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "INI experiment config");
    sub->add_option("--set", sets, "Override a config key (section.key=value)")
        ->take_all();
    sub->add_option("--seed", seed, "Overrides noc.seed");
    sub->add_option("--max-cycle", max_cycle, "Overrides run.max_cycle");
    sub->add_option("--out-dir", out_dir, "Overrides output.dir");
  };

  CLI::App* run = app.add_subcommand("run", "Run one experiment");
  common(run);

  CLI::App* gen = app.add_subcommand("gen", "Write generated traffic as a trace");
  common(gen);
  std::string gen_kind;
  std::optional<std::filesystem::path> gen_out;
  std::optional<std::string> gen_sweep;
  gen->add_option("kind", gen_kind, "uniform or cnn")
      ->required()
      ->check(CLI::IsMember({"uniform", "cnn"}));
  gen->add_option("--out", gen_out,
                  "Trace file, or directory with --sparsity-sweep");
  gen->add_option("--sparsity-sweep", gen_sweep,
                  "Comma list or start:stop:step; one trace per value");

  CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  common(sweep);
  std::optional<std::string> sweep_var;
  std::optional<std::string> sweep_values;
  std::optional<unsigned> jobs;
  sweep->add_option("--variable", sweep_var, "sparsity, flit_rate or mesh_size");
  sweep->add_option("--values", sweep_values, "Comma list or start:stop:step");
  sweep->add_option("--jobs", jobs, "Points run in parallel");

  CLI::App* validate = app.add_subcommand("validate-trace", "Check a trace file");
  std::filesystem::path trace_path;
  validate->add_option("trace", trace_path, "Trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (validate->parsed()) return cmd_validate_trace(trace_path);

    std::vector<Override> overrides;
    if (gen->parsed()) overrides.push_back({"traffic.kind", gen_kind});
    for (const std::string& s : sets) overrides.push_back(parse_override(s));
    if (seed) overrides.push_back({"noc.seed", std::to_string(*seed)});
    if (max_cycle) overrides.push_back({"run.max_cycle", std::to_string(*max_cycle)});
    if (out_dir) overrides.push_back({"output.dir", *out_dir});
    if (sweep_var) overrides.push_back({"sweep.variable", *sweep_var});
    if (sweep_values) overrides.push_back({"sweep.values", *sweep_values});
    if (jobs) overrides.push_back({"sweep.jobs", std::to_string(*jobs)});
    if (gen_sweep) {
      // The swept key may be absent from the config; give it a placeholder.
      overrides.push_back({"traffic.sparsity", "0"});
    }

    const ExperimentConfig cfg = load_config(config_path, overrides);
    if (run->parsed()) {
      if (cfg.sweep) {
        throw Error(ErrorCode::InvalidConfig,
                    "sweep.variable: set; use the sweep subcommand");
      }
      return cmd_run(cfg);
    }
    if (sweep->parsed()) return cmd_sweep(cfg);

    std::vector<std::string> points;
    if (gen_sweep) points = expand_values("--sparsity-sweep", *gen_sweep);
    const std::filesystem::path out =
        gen_out ? *gen_out
                : cfg.output.dir / (points.empty() ? "traffic.trace" : "");
    return cmd_gen(cfg, out, points);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidConfig ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace emunoc::cli
