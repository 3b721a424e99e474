// SPDX-License-Identifier: Apache-2.0

#include "emunoc/traffic/event.hpp"

#include <string>

namespace emunoc::traffic {

void validate_events(const EventList& events, unsigned nodes,
                     unsigned max_len) {
  const std::size_t n = events.size();
  std::vector<std::size_t> position(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const TrafficEvent& e = events[i];
    const std::string who = "packet " + std::to_string(e.id);
    if (e.id >= n || position[e.id] != n) {
      throw Error(ErrorCode::InvalidConfig,
                  who + ": ids must be unique and dense from 0");
    }
    position[e.id] = i;
    if (e.src >= nodes || e.dst >= nodes) {
      throw Error(ErrorCode::InvalidConfig,
                  who + ": address outside the " + std::to_string(nodes) +
                      "-node mesh");
    }
    if (e.len == 0 || e.len > max_len) {
      throw Error(ErrorCode::InvalidConfig,
                  who + ": length " + std::to_string(e.len) +
                      " outside [1, " + std::to_string(max_len) + "]");
    }
  }

  // Kahn's algorithm over dep -> dependent edges.
  std::vector<std::vector<PacketId>> dependents(n);
  std::vector<std::size_t> pending(n, 0);
  for (const TrafficEvent& e : events) {
    for (PacketId d : e.deps) {
      if (d >= n) {
        throw Error(ErrorCode::DanglingDependency,
                    "packet " + std::to_string(e.id) +
                        " depends on unknown packet " + std::to_string(d));
      }
      dependents[d].push_back(e.id);
      ++pending[e.id];
    }
  }
  std::vector<PacketId> ready;
  for (PacketId id = 0; id < n; ++id) {
    if (pending[id] == 0) ready.push_back(id);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const PacketId id = ready.back();
    ready.pop_back();
    ++visited;
    for (PacketId dep : dependents[id]) {
      if (--pending[dep] == 0) ready.push_back(dep);
    }
  }
  if (visited != n) {
    for (PacketId id = 0; id < n; ++id) {
      if (pending[id] != 0) {
        throw Error(ErrorCode::CyclicDependency,
                    "dependency cycle through packet " + std::to_string(id));
      }
    }
  }
}

}  // namespace emunoc::traffic
