// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "emunoc/cli/commands.hpp"
#include "emunoc/cli/config.hpp"
#include "emunoc/traffic/trace.hpp"

using namespace emunoc;
using namespace emunoc::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kRecipes = EMUNOC_RECIPES;

struct Result {
  int status = -1;
  std::string output;  // stdout and stderr
};

Result sh(const std::string& args, const fs::path& cwd) {
  const std::string cmd =
      "cd '" + cwd.string() + "' && '" EMUNOC_BINARY "' " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) r.output.append(buf, n);
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::size_t lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("emunoc_test_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& file, const std::string& text) const {
    std::ofstream(path / file) << text;
    return path / file;
  }
};

std::string config_error(const std::string& ini,
                         const std::vector<Override>& overrides = {}) {
  TempDir dir("cfg");
  const auto p = dir.write("c.ini", ini);
  try {
    load_config(p, overrides);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidConfig);
    return e.what();
  }
  return "no error";
}

constexpr const char* kUniform =
    "[noc]\nwidth = 4\nheight = 4\n"
    "[traffic]\nkind = uniform\nflit_rate = 0.05\nduration = 2000\n"
    "[output]\ntiming = false\n";

}  // namespace

TEST_CASE("config: values, defaults and overrides") {
  TempDir dir("load");
  const auto p = dir.write("c.ini", kUniform);
  auto cfg = load_config(p, {});
  CHECK(cfg.noc.width == 4);
  CHECK(cfg.noc.num_vcs == 2);
  CHECK(cfg.noc.buffer_depth == 8);
  CHECK(cfg.noc.router_delay == 2);
  CHECK(cfg.noc.packet_len == 5);
  CHECK(cfg.traffic.kind == TrafficKind::Uniform);
  CHECK(cfg.traffic.flit_rate == 0.05);
  CHECK_FALSE(cfg.output.timing);
  CHECK_FALSE(cfg.sweep.has_value());

  cfg = load_config(p, {parse_override("noc.width=7"), parse_override("noc.seed = 9")});
  CHECK(cfg.noc.width == 7);
  CHECK(cfg.noc.seed == 9);

  CHECK(expand_values("sweep.values", "0.5:0.95:0.05") ==
        std::vector<std::string>{"0.50", "0.55", "0.60", "0.65", "0.70", "0.75",
                                 "0.80", "0.85", "0.90", "0.95"});
  CHECK(expand_values("sweep.values", "5, 8,13") == std::vector<std::string>{"5", "8", "13"});
  CHECK(expand_values("sweep.values", "1:3:1") == std::vector<std::string>{"1", "2", "3"});
}

TEST_CASE("config errors name the key") {
  CHECK(config_error("[noc]\nheight = 4\n[traffic]\nkind = uniform\n").find("noc.width") == 0);
  CHECK(config_error("[noc]\nwidth = 4\nheight = 4\n[traffic]\nkind = uniform\n"
                     "duration = 10\n")
            .find("traffic.flit_rate") == 0);
  CHECK(config_error(kUniform, {{"noc.num_vcs", "0"}}).find("noc.num_vcs") == 0);
  CHECK(config_error(kUniform, {{"noc.width", "abc"}}).find("noc.width") == 0);
  CHECK(config_error(kUniform, {{"noc.colour", "red"}}).find("noc.colour") == 0);
  CHECK(config_error(kUniform, {{"traffic.kind", "bursty"}}).find("traffic.kind") == 0);
  CHECK(config_error(kUniform, {{"run.link", "pcie"}}).find("run.link") == 0);
  CHECK(config_error(kUniform, {{"output.timing", "maybe"}}).find("output.timing") == 0);
  CHECK(config_error(kUniform, {{"sweep.variable", "colour"}, {"sweep.values", "1"}})
            .find("sweep.variable") == 0);
  CHECK(config_error(kUniform, {{"sweep.variable", "flit_rate"}, {"sweep.values", ""}})
            .find("sweep.values") == 0);
  CHECK(config_error(kUniform, {{"sweep.variable", "flit_rate"}, {"sweep.values", "0:1:0"}})
            .find("sweep.values") == 0);
  CHECK_THROWS_AS(parse_override("no-equals-sign"), Error);
}

TEST_CASE("run: recipe produces a report") {
  TempDir dir("run");
  const auto r = sh("run --config '" + (kRecipes / "uniform_5x5.ini").string() +
                        "' --out-dir out",
                    dir.path);
  CHECK(r.status == 0);
  CHECK(r.output.find("packets=2555 delivered=2555") != std::string::npos);
  CHECK(fs::exists(dir.path / "out/summary.json"));
  CHECK(fs::file_size(dir.path / "out/frames.bin") > 0);
  CHECK(lines(slurp(dir.path / "out/packets.csv")) == 2556);
}

TEST_CASE("run: errors and exit codes") {
  TempDir dir("errors");
  dir.write("bad.ini", "[noc]\nheight = 4\n[traffic]\nkind = uniform\n");
  auto r = sh("run --config bad.ini", dir.path);
  CHECK(r.status == 2);
  CHECK(r.output.find("noc.width") != std::string::npos);

  r = sh("run --config missing.ini", dir.path);
  CHECK(r.status == 2);
  CHECK(r.output.find("--config") != std::string::npos);

  dir.write("u.ini", kUniform);
  r = sh("run --config u.ini --set traffic.flit_rate=2", dir.path);
  CHECK(r.status != 0);
  CHECK(r.output.find("traffic.flit_rate") != std::string::npos);

  r = sh("run --config u.ini --set bogus", dir.path);
  CHECK(r.status == 2);
  CHECK(r.output.find("--set") != std::string::npos);

  r = sh("run --config u.ini --max-cycle 100 --out-dir o", dir.path);
  CHECK(r.status == 0);
  CHECK(r.output.find("cycles=100 ") != std::string::npos);

  r = sh("frobnicate", dir.path);
  CHECK(r.status != 0);
}

TEST_CASE("gen: uniform at rate 0 writes a header-only trace") {
  TempDir dir("gen0");
  dir.write("u.ini", kUniform);
  const auto r = sh("gen uniform --config u.ini --set traffic.flit_rate=0 --out t.trace",
                    dir.path);
  CHECK(r.status == 0);
  CHECK(slurp(dir.path / "t.trace") == "emunoc-trace v1 nodes=16 packets=0\n");
}

TEST_CASE("gen: a sparsity sweep writes one trace per point") {
  TempDir dir("gensweep");
  const auto r = sh("gen cnn --config '" + (kRecipes / "cnn_mapping.ini").string() +
                        "' --set traffic.duration=2000 --sparsity-sweep 0.5:0.95:0.05"
                        " --out traces",
                    dir.path);
  CHECK(r.status == 0);
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir.path / "traces")) {
    CHECK(e.path().extension() == ".trace");
    ++n;
  }
  CHECK(n == 10);
  CHECK(fs::exists(dir.path / "traces/cnn_sparsity_0.60.trace"));
  const auto dense = traffic::load_trace(dir.path / "traces/cnn_sparsity_0.50.trace");
  const auto sparse = traffic::load_trace(dir.path / "traces/cnn_sparsity_0.95.trace");
  CHECK(dense.events.size() > sparse.events.size());
}

TEST_CASE("gen then run consumes the trace") {
  TempDir dir("roundtrip");
  dir.write("u.ini", kUniform);
  auto r = sh("gen uniform --config u.ini --out t.trace", dir.path);
  REQUIRE(r.status == 0);
  r = sh("validate-trace t.trace", dir.path);
  CHECK(r.status == 0);
  dir.write("t.ini",
            "[noc]\nwidth = 4\nheight = 4\n[traffic]\nkind = trace\ntrace = t.trace\n"
            "[output]\ntiming = false\n");
  r = sh("run --config t.ini --out-dir from_trace", dir.path);
  CHECK(r.status == 0);
  r = sh("run --config u.ini --out-dir direct", dir.path);
  CHECK(r.status == 0);
  CHECK(slurp(dir.path / "from_trace/packets.csv") == slurp(dir.path / "direct/packets.csv"));
  CHECK(slurp(dir.path / "from_trace/frames.bin") == slurp(dir.path / "direct/frames.bin"));

  dir.write("bad.trace", "emunoc-trace v1 nodes=4 packets=1\n0 0 0 1 5 3\n");
  r = sh("validate-trace bad.trace", dir.path);
  CHECK(r.status != 0);
  CHECK(r.output.find("bad.trace:2") != std::string::npos);

  r = sh("run --config t.ini --set noc.width=5", dir.path);
  CHECK(r.status == 2);
  CHECK(r.output.find("traffic.trace") != std::string::npos);
}

TEST_CASE("sweep: sparsity 0.5..0.95 gives a 10-row CSV in spec order") {
  TempDir dir("sweep");
  const auto r = sh("sweep --config '" + (kRecipes / "cnn_sparsity_sweep.ini").string() +
                        "' --set traffic.duration=3000 --jobs 3 --out-dir s",
                    dir.path);
  CHECK(r.status == 0);
  const auto csv = slurp(dir.path / "s/sweep.csv");
  CHECK(lines(csv) == 11);
  CHECK(csv.rfind("point,max_latency,mean_latency,emu_hz,", 0) == 0);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  for (const char* v : {"0.50", "0.55", "0.60", "0.65", "0.70", "0.75", "0.80",
                        "0.85", "0.90", "0.95"}) {
    std::getline(in, line);
    CHECK(line.rfind(std::string(v) + ",", 0) == 0);
    CHECK(line.find(",ok,") != std::string::npos);
  }
}

TEST_CASE("sweep: empty list is an error; failed points are recorded") {
  TempDir dir("sweeperr");
  dir.write("u.ini", kUniform);
  auto r = sh("sweep --config u.ini --variable flit_rate --values ''", dir.path);
  CHECK(r.status == 2);
  CHECK(r.output.find("sweep.values") != std::string::npos);

  r = sh("sweep --config u.ini --variable flit_rate --values 0.01,1.5", dir.path);
  CHECK(r.status == 2);
  CHECK(r.output.find("sweep.values") != std::string::npos);

  // At 20 kHz a 1000-neuron core needs more than one packet per cycle unless
  // sparsity is at least 1/3, so the first point fails at run time.
  r = sh("sweep --config '" + (kRecipes / "cnn_mapping.ini").string() +
             "' --set traffic.frequency=20000 --set traffic.duration=500"
             " --variable sparsity --values 0.0,0.5,0.9 --out-dir s",
         dir.path);
  CHECK(r.status == 1);
  const auto csv = slurp(dir.path / "s/sweep.csv");
  CHECK(lines(csv) == 4);
  CHECK(csv.find("\n0.0" + std::string(12, ',') + "failed,") != std::string::npos);
  CHECK(csv.find("traffic.sparsity") != std::string::npos);
  CHECK(csv.find("\n0.5,") != std::string::npos);
  CHECK(csv.find("\n0.9,") != std::string::npos);
}

TEST_CASE("equal seeds give byte-identical outputs; seeds matter") {
  TempDir dir("determinism");
  const std::string cfg = "--config '" + (kRecipes / "uniform_5x5.ini").string() + "'";
  REQUIRE(sh("run " + cfg + " --out-dir a", dir.path).status == 0);
  REQUIRE(sh("run " + cfg + " --out-dir b", dir.path).status == 0);
  REQUIRE(sh("run " + cfg + " --seed 2 --out-dir c", dir.path).status == 0);
  for (const char* f : {"summary.json", "packets.csv", "frames.bin"}) {
    CHECK(slurp(dir.path / "a" / f) == slurp(dir.path / "b" / f));
    CHECK(slurp(dir.path / "a" / f) != slurp(dir.path / "c" / f));
  }
  REQUIRE(sh("run " + cfg + " --set run.link=threaded --out-dir t", dir.path).status == 0);
  CHECK(slurp(dir.path / "a/frames.bin") == slurp(dir.path / "t/frames.bin"));
}

TEST_CASE("timing on reports wall time and emulation frequency") {
  TempDir dir("timing");
  dir.write("u.ini", kUniform);
  REQUIRE(sh("run --config u.ini --set output.timing=true --out-dir o", dir.path).status == 0);
  const auto json = slurp(dir.path / "o/summary.json");
  CHECK(json.find("\"wall_seconds\": null") == std::string::npos);
  CHECK(json.find("\"emu_hz\": null") == std::string::npos);
}

TEST_CASE("in-process API: build_mapping and at_point") {
  TempDir dir("api");
  auto cfg = load_config(kRecipes / "cnn_mapping.ini", {});
  const auto snake = build_mapping(cfg);
  CHECK(snake.cores.size() == 25);
  CHECK(snake.noc_frequency == 5e5);
  cfg.traffic.mapping = "locality";
  CHECK(build_mapping(cfg) != snake);
  cfg.traffic.layers = {100000};
  try {
    build_mapping(cfg);
    FAIL("oversized layer accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridTooSmall);
    CHECK(std::string(e.what()).find("traffic.layers") == 0);
  }
  const auto p = at_point(load_config(kRecipes / "mesh_size_sweep.ini", {}),
                          SweepVariable::MeshSize, "8");
  CHECK(p.noc.width == 8);
  CHECK(p.noc.height == 8);
  CHECK_FALSE(p.sweep.has_value());
}
