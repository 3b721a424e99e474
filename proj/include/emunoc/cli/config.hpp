// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emunoc/host/host.hpp"
#include "emunoc/noc/config.hpp"

namespace emunoc::cli {

enum class TrafficKind { Uniform, Trace, Cnn };

struct TrafficConfig {
  TrafficKind kind = TrafficKind::Uniform;
  double flit_rate = 0.0;
  Cycle duration = 0;
  std::filesystem::path trace;
  // cnn
  std::string mapping = "snake";  // snake, locality or a mapping file path
  std::vector<std::uint64_t> layers;
  std::uint64_t neurons_per_core = 0;
  double sparsity = 0.0;
  double framerate = 30.0;
  double frequency = 1e9;
};

struct OutputConfig {
  std::filesystem::path dir = "out";
  bool timing = true;  // wall_seconds / emu_hz; off for byte-stable output
  bool frame_log = true;
};

enum class SweepVariable { Sparsity, FlitRate, MeshSize };

struct SweepConfig {
  SweepVariable variable = SweepVariable::Sparsity;
  std::vector<std::string> values;  // as written, for the CSV point column
  unsigned jobs = 1;
};

struct ExperimentConfig {
  noc::NocConfig noc;
  TrafficConfig traffic;
  host::RunOptions run;
  OutputConfig output;
  std::optional<SweepConfig> sweep;
};

/// `key=value` with a dotted section.key path.
struct Override {
  std::string key;
  std::string value;
};
Override parse_override(const std::string& text);

/// Reads the INI file (if any), applies overrides, and validates. Every
/// error is Error{InvalidConfig} and names the key. Relative paths inside
/// the file resolve against the file's directory.
ExperimentConfig load_config(const std::optional<std::filesystem::path>& path,
                             const std::vector<Override>& overrides);

/// Comma-separated list; `a:b:step` expands to an inclusive range.
std::vector<std::string> expand_values(const std::string& key,
                                       const std::string& text);

const char* to_string(TrafficKind kind);
const char* to_string(SweepVariable variable);

}  // namespace emunoc::cli
