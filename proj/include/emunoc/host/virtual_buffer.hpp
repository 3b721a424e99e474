// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <set>
#include <utility>
#include <variant>
#include <vector>

#include "emunoc/traffic/event.hpp"
#include "emunoc/transactor/frames.hpp"
#include "emunoc/transactor/transactor.hpp"

namespace emunoc::host {

enum class EntryState { Blocked, Eligible, Sent, Received };

const char* to_string(EntryState state);

struct BufferEntry {
  traffic::TrafficEvent event;
  EntryState state = EntryState::Blocked;
  std::size_t pending_deps = 0;
  std::optional<Cycle> injected;  // quantum the descriptor was sent with
  std::optional<Cycle> arrived;
};

/// Next frame to send: the quantum bound, the packets injected at it, and
/// whether the hardware may return early once it drains.
struct Quantum {
  Cycle cycle = 0;
  std::vector<PacketId> batch;
  transactor::RunMode mode = transactor::RunMode::UntilStopped;
};
struct Stop {
  bool truncated = false;  // packets left over because of max_cycle
};
using Plan = std::variant<Quantum, Stop>;

/// Host-side record of every packet in a run. Ids must be dense from 0.
class VirtualBuffer {
 public:
  explicit VirtualBuffer(traffic::EventList events);

  std::size_t size() const { return entries_.size(); }
  const BufferEntry& entry(PacketId id) const { return entries_.at(id); }
  std::size_t count(EntryState state) const;
  std::size_t in_flight() const { return in_flight_; }

  /// Earliest injectable quantum given the hardware sits at `now`, and every
  /// Eligible packet that can go with it, in id order. A packet whose icyc has
  /// passed is injected at now + 1.
  std::optional<std::pair<Cycle, std::vector<PacketId>>> select_earliest(
      Cycle now) const;

  /// Decides the next frame. Throws Error{DependencyDeadlock} listing the
  /// stuck ids when nothing is in flight, nothing can be injected and packets
  /// remain blocked.
  Plan advance(Cycle now, Cycle max_cycle) const;

  /// Marks the batch Sent at `quantum` and builds its frame.
  transactor::InjectionFrame send_quantum(const std::vector<PacketId>& batch,
                                          Cycle quantum);

  /// Records arrivals and promotes dependents whose last dependency this was.
  /// Throws Error{UnknownPacket} for an id never sent and
  /// Error{DuplicateArrival} for one already received.
  void match_received(const transactor::EjectionFrame& frame);

 private:
  std::vector<BufferEntry> entries_;
  std::vector<std::vector<PacketId>> dependents_;
  std::set<std::pair<Cycle, PacketId>> eligible_;  // (icyc, id)
  std::size_t in_flight_ = 0;
  // In-flight packets that still have dependents waiting on them.
  std::size_t gating_ = 0;
};

}  // namespace emunoc::host
