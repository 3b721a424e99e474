// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "emunoc/common.hpp"

namespace emunoc::metrics {

/// One packet of a run. Packets the run never injected or never saw arrive
/// leave the corresponding fields empty.
struct PacketRecord {
  PacketId id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint16_t len = 1;
  Cycle icyc = 0;
  std::optional<Cycle> injected;
  std::optional<Cycle> arrived;
  std::optional<Cycle> head_arrived;

  /// Full-packet latency: injection quantum to the halt cycle that reported
  /// the packet.
  std::optional<Cycle> latency() const {
    if (!injected || !arrived) return std::nullopt;
    return *arrived - *injected;
  }
  std::optional<Cycle> head_latency() const {
    if (!injected || !head_arrived) return std::nullopt;
    return *head_arrived - *injected;
  }
};

struct Summary {
  std::uint64_t packets = 0;    // records passed in
  std::uint64_t delivered = 0;  // records with a latency
  std::uint64_t flits_delivered = 0;
  Cycle cycles = 0;
  std::optional<double> wall_seconds;
  std::optional<double> emu_hz;
  // Latency statistics over delivered packets; empty when none arrived.
  std::optional<double> min_latency;
  std::optional<double> max_latency;
  std::optional<double> mean_latency;
  std::optional<double> p50_latency;
  std::optional<double> p99_latency;
  std::optional<double> mean_head_latency;
  double accepted_flit_rate = 0.0;  // flits delivered / (cycles * nodes)
};

/// Percentile of an ascending sample: the value at 1-based rank
/// min(n, floor(p * n) + 1). Sample must be nonempty, 0 <= p <= 1.
double nearest_rank(const std::vector<double>& sorted, double p);

/// `wall_seconds` may be empty when timing is not recorded; emu_hz is then
/// empty too.
Summary summarize(const std::vector<PacketRecord>& records, Cycle sim_cycles,
                  std::optional<double> wall_seconds, unsigned nodes);

/// Writes the JSON summary (keys: packets, delivered, cycles, wall_seconds,
/// emu_hz, latency statistics, per_packet) to `json_path` and the per-packet
/// CSV (id,src,dst,len,icyc,injected,arrived,latency,head_latency) to
/// `csv_path`. Throws Error{Io} naming the path.
void write_report(const Summary& summary,
                  const std::vector<PacketRecord>& records,
                  const std::filesystem::path& json_path,
                  const std::filesystem::path& csv_path);

std::string summary_json(const Summary& summary,
                         const std::vector<PacketRecord>& records);
std::string packets_csv(const std::vector<PacketRecord>& records);

}  // namespace emunoc::metrics
