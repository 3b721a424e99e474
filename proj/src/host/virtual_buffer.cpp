// SPDX-License-Identifier: Apache-2.0

#include "emunoc/host/virtual_buffer.hpp"

#include <algorithm>
#include <string>

namespace emunoc::host {

const char* to_string(EntryState state) {
  switch (state) {
    case EntryState::Blocked: return "Blocked";
    case EntryState::Eligible: return "Eligible";
    case EntryState::Sent: return "Sent";
    case EntryState::Received: return "Received";
  }
  return "?";
}

VirtualBuffer::VirtualBuffer(traffic::EventList events) {
  entries_.resize(events.size());
  dependents_.resize(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].id != i) {
      throw Error(ErrorCode::InvalidConfig,
                  "event ids must be dense from 0; position " +
                      std::to_string(i) + " holds id " +
                      std::to_string(events[i].id));
    }
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    BufferEntry& e = entries_[i];
    e.event = std::move(events[i]);
    for (PacketId dep : e.event.deps) {
      if (dep >= entries_.size()) {
        throw Error(ErrorCode::DanglingDependency,
                    "packet " + std::to_string(i) + " depends on unknown id " +
                        std::to_string(dep));
      }
      dependents_[dep].push_back(e.event.id);
    }
    e.pending_deps = e.event.deps.size();
    if (e.pending_deps == 0) {
      e.state = EntryState::Eligible;
      eligible_.emplace(e.event.icyc, e.event.id);
    }
  }
}

std::size_t VirtualBuffer::count(EntryState state) const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(),
                    [state](const BufferEntry& e) { return e.state == state; }));
}

std::optional<std::pair<Cycle, std::vector<PacketId>>>
VirtualBuffer::select_earliest(Cycle now) const {
  if (eligible_.empty()) return std::nullopt;
  const Cycle quantum = std::max(eligible_.begin()->first, now + 1);
  std::vector<PacketId> batch;
  for (auto it = eligible_.begin();
       it != eligible_.end() && it->first <= quantum; ++it) {
    batch.push_back(it->second);
  }
  std::sort(batch.begin(), batch.end());
  return std::make_pair(quantum, std::move(batch));
}

Plan VirtualBuffer::advance(Cycle now, Cycle max_cycle) const {
  if (now >= max_cycle) {
    return Stop{in_flight_ > 0 || !eligible_.empty() ||
                count(EntryState::Blocked) > 0};
  }
  auto next = select_earliest(now);

  // A packet in flight could unblock a dependent: advance one cycle at a time
  // so the dependent goes out the cycle after its last dependency arrives.
  if (gating_ > 0) {
    Quantum q{now + 1, {}, transactor::RunMode::UntilStopped};
    if (next && next->first == now + 1) q.batch = std::move(next->second);
    return q;
  }
  if (next && next->first <= max_cycle) {
    return Quantum{next->first, std::move(next->second),
                   transactor::RunMode::UntilStopped};
  }
  if (in_flight_ > 0) {
    return Quantum{max_cycle, {}, transactor::RunMode::UntilIdle};
  }
  if (next) return Stop{true};

  std::vector<PacketId> stuck;
  for (const BufferEntry& e : entries_) {
    if (e.state == EntryState::Blocked) stuck.push_back(e.event.id);
  }
  if (stuck.empty()) return Stop{false};
  std::string ids;
  for (std::size_t i = 0; i < stuck.size() && i < 16; ++i) {
    ids += (i ? "," : "") + std::to_string(stuck[i]);
  }
  if (stuck.size() > 16) ids += ",...";
  throw Error(ErrorCode::DependencyDeadlock,
              std::to_string(stuck.size()) +
                  " packets blocked with nothing in flight: " + ids);
}

transactor::InjectionFrame VirtualBuffer::send_quantum(
    const std::vector<PacketId>& batch, Cycle quantum) {
  transactor::InjectionFrame frame;
  frame.injection_cycle = quantum;
  frame.descriptors.reserve(batch.size());
  for (PacketId id : batch) {
    BufferEntry& e = entries_.at(id);
    if (e.state != EntryState::Eligible) {
      throw Error(ErrorCode::ContractViolation,
                  "packet " + std::to_string(id) + " sent while " +
                      to_string(e.state));
    }
    eligible_.erase({e.event.icyc, id});
    e.state = EntryState::Sent;
    e.injected = quantum;
    ++in_flight_;
    if (!dependents_[id].empty()) ++gating_;
    frame.descriptors.push_back({id, static_cast<std::uint16_t>(e.event.src),
                                 static_cast<std::uint16_t>(e.event.dst),
                                 e.event.len});
  }
  return frame;
}

void VirtualBuffer::match_received(const transactor::EjectionFrame& frame) {
  for (const transactor::Arrival& a : frame.arrivals) {
    if (a.id >= entries_.size()) {
      throw Error(ErrorCode::UnknownPacket,
                  "arrival for unknown packet " + std::to_string(a.id));
    }
    BufferEntry& e = entries_[a.id];
    if (e.state == EntryState::Received) {
      throw Error(ErrorCode::DuplicateArrival,
                  "packet " + std::to_string(a.id) + " arrived twice");
    }
    if (e.state != EntryState::Sent) {
      throw Error(ErrorCode::UnknownPacket,
                  "arrival for packet " + std::to_string(a.id) +
                      " that was never sent");
    }
    e.state = EntryState::Received;
    e.arrived = a.arrival_cycle;
    --in_flight_;
    if (!dependents_[a.id].empty()) --gating_;
    for (PacketId d : dependents_[a.id]) {
      BufferEntry& child = entries_[d];
      if (--child.pending_deps == 0) {
        child.state = EntryState::Eligible;
        eligible_.emplace(child.event.icyc, d);
      }
    }
  }
}

}  // namespace emunoc::host
