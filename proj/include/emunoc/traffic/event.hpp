// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "emunoc/common.hpp"

namespace emunoc::traffic {

/// A packet the host wants injected no earlier than `icyc`, and only after
/// every packet in `deps` has been received.
struct TrafficEvent {
  PacketId id = 0;
  Cycle icyc = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint16_t len = 1;
  std::vector<PacketId> deps;

  friend bool operator==(const TrafficEvent&, const TrafficEvent&) = default;
};

using EventList = std::vector<TrafficEvent>;

/// Checks ids are dense from 0 and unique, addresses lie inside `nodes`,
/// lengths are in [1, max_len], every dependency names a known id, and the
/// dependency graph is acyclic. Throws Error with DanglingDependency,
/// CyclicDependency or InvalidConfig.
void validate_events(const EventList& events, unsigned nodes,
                     unsigned max_len);

}  // namespace emunoc::traffic
