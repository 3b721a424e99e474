// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emunoc/cli/config.hpp"
#include "emunoc/host/host.hpp"
#include "emunoc/metrics/metrics.hpp"
#include "emunoc/traffic/event.hpp"
#include "emunoc/traffic/mapping.hpp"
#include "emunoc/transactor/frames.hpp"

namespace emunoc::cli {

/// CNN mapping described by the traffic section, padded to the mesh.
traffic::CnnMapping build_mapping(const ExperimentConfig& cfg);

traffic::EventList build_events(const ExperimentConfig& cfg);

struct Outcome {
  host::RunReport report;
  metrics::Summary summary;
  std::optional<double> offered_flit_rate;  // generated flits per node-cycle
};

/// Generates traffic and runs it. `log` may be null.
Outcome run_experiment(const ExperimentConfig& cfg,
                       transactor::FrameLog* log = nullptr);

/// Copy of `cfg` with the sweep variable set to `value`.
ExperimentConfig at_point(const ExperimentConfig& cfg, SweepVariable variable,
                          const std::string& value);

/// Runs `run`, writing summary.json, packets.csv and frames.bin to the
/// output dir. Returns the process exit status.
int cmd_run(const ExperimentConfig& cfg);

/// Writes one trace per sparsity value into `out` (a directory) when
/// `sparsities` is nonempty, else a single trace to `out`.
int cmd_gen(const ExperimentConfig& cfg, const std::filesystem::path& out,
            const std::vector<std::string>& sparsities);

/// Writes sweep.csv to the output dir. Failed points are recorded and make
/// the exit status nonzero.
int cmd_sweep(const ExperimentConfig& cfg);

int cmd_validate_trace(const std::filesystem::path& path);

/// Full command-line entry point.
int main_entry(int argc, char** argv);

}  // namespace emunoc::cli
