// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "emunoc/metrics/metrics.hpp"
#include "emunoc/noc/config.hpp"
#include "emunoc/traffic/event.hpp"
#include "emunoc/transactor/frames.hpp"
#include "emunoc/transactor/transactor.hpp"

namespace emunoc::host {

enum class LinkKind { InProcess, Threaded };

struct RunOptions {
  /// Hard cap on emulated time. Packets not delivered by then are reported
  /// without an arrival.
  Cycle max_cycle = std::numeric_limits<std::int64_t>::max();
  LinkKind link = LinkKind::InProcess;
  transactor::FrameLog* log = nullptr;  // optional; frames in crossing order
};

struct RunReport {
  std::vector<metrics::PacketRecord> packets;  // indexed by id
  std::uint64_t delivered = 0;
  Cycle cycles = 0;  // emulated cycles executed
  double wall_seconds = 0.0;
  std::uint64_t injection_frames = 0;
  std::uint64_t ejection_frames = 0;
  bool truncated = false;  // stopped at max_cycle with work left
  transactor::SafetyStats safety;
};

/// Drives one emulation run to completion. Validates the config and events
/// first; throws Error{DependencyDeadlock} if blocked packets can never go.
RunReport run(const noc::NocConfig& config, const traffic::EventList& events,
              const RunOptions& options = {});

}  // namespace emunoc::host
