// SPDX-License-Identifier: Apache-2.0

#include "emunoc/transactor/transactor.hpp"

#include <string>

namespace emunoc::transactor {

RoundRobinArbiter::RoundRobinArbiter(unsigned width) : width_(width) {
  if (width_ == 0) {
    throw Error(ErrorCode::InvalidConfig, "arbiter needs at least one slot");
  }
}

void RoundRobinArbiter::finish_burst(unsigned last_granted) {
  pointer_ = (last_granted + 1) % width_;
}

// ---------------------------------------------------------------------------

Injector::Injector(const noc::NocConfig& config) : config_(config) {
  pes_.reserve(config_.node_count());
  for (NodeId n = 0; n < config_.node_count(); ++n) {
    pes_.emplace_back(n, config_.num_vcs);
  }
}

void Injector::validate(const InjectionFrame& frame) const {
  const unsigned nodes = config_.node_count();
  for (const PacketDescriptor& d : frame.descriptors) {
    const std::string who = "descriptor for packet " + std::to_string(d.id);
    if (d.src >= nodes || d.dst >= nodes) {
      throw Error(ErrorCode::MalformedFrame,
                  who + ": address outside the " + std::to_string(nodes) +
                      "-node mesh");
    }
    if (d.len == 0 || d.len > config_.packet_len) {
      throw Error(ErrorCode::MalformedFrame,
                  who + ": length " + std::to_string(d.len) +
                      " outside [1, " + std::to_string(config_.packet_len) +
                      "]");
    }
  }
}

void Injector::accept(const InjectionFrame& frame) {
  validate(frame);
  if (frame.descriptors.empty()) return;
  auto& due = schedule_[frame.injection_cycle];
  due.insert(due.end(), frame.descriptors.begin(), frame.descriptors.end());
}

void Injector::release_due(Cycle counter) {
  while (!schedule_.empty() && schedule_.begin()->first <= counter) {
    for (const PacketDescriptor& d : schedule_.begin()->second) {
      // conv: descriptor -> head flit fields
      pes_[d.src].enqueue({d.id, d.src, d.dst, d.len});
    }
    schedule_.erase(schedule_.begin());
  }
}

void Injector::collect(const noc::Network& net,
                       std::vector<noc::Injection>& out) {
  for (NodeId node = 0; node < pes_.size(); ++node) {
    if (pes_[node].idle()) continue;
    if (auto inj = pes_[node].next(net.inject_ready(node))) out.push_back(*inj);
  }
}

bool Injector::idle() const {
  if (!schedule_.empty()) return false;
  for (const auto& pe : pes_) {
    if (!pe.idle()) return false;
  }
  return true;
}

std::size_t Injector::scheduled() const {
  std::size_t n = 0;
  for (const auto& [cycle, ds] : schedule_) n += ds.size();
  return n;
}

// ---------------------------------------------------------------------------

std::optional<EjectionFrame> ejector_poll(noc::Network& net,
                                          ClockHalter& halter,
                                          RoundRobinArbiter& arbiter) {
  const unsigned vcs = net.config().num_vcs;
  bool any = false;
  for (NodeId n = 0; n < net.node_count() && !any; ++n) {
    for (unsigned vc = 0; vc < vcs && !any; ++vc) {
      any = net.packet_complete(n, vc);
    }
  }
  if (!any) return std::nullopt;

  halter.set_halt(true);
  EjectionFrame frame;
  frame.halt_cycle = halter.counter();
  unsigned last = arbiter.pointer();
  for (unsigned k = 0; k < arbiter.width(); ++k) {
    const unsigned s = arbiter.slot(k);
    const NodeId node = s / vcs;
    const unsigned vc = s % vcs;
    if (!net.packet_complete(node, vc)) continue;
    const Cycle arrived = net.ejection_ni(node).completion_cycle(vc);
    const noc::PacketHeader h = net.drain_ejection(node, vc);
    // iconv: head flit -> descriptor
    frame.arrivals.push_back({h.id, static_cast<std::uint16_t>(h.src),
                              static_cast<std::uint16_t>(h.dst), h.len,
                              arrived});
    last = s;
  }
  arbiter.finish_burst(last);
  halter.set_halt(false);
  return frame;
}

// ---------------------------------------------------------------------------

SafetyStats& SafetyStats::operator+=(const SafetyStats& o) {
  cycles += o.cycles;
  bursts += o.bursts;
  bound_violations += o.bound_violations;
  stamp_violations += o.stamp_violations;
  drain_time_moved += o.drain_time_moved;
  clock_skew += o.clock_skew;
  order_violations += o.order_violations;
  return *this;
}

Transactor::Transactor(const noc::NocConfig& config)
    : net_(config),
      injector_(config),
      arbiter_(config.node_count() * config.num_vcs) {}

void Transactor::accept(const InjectionFrame& frame) {
  // A rejected frame must leave the halter untouched.
  injector_.validate(frame);
  halter_.store(frame.injection_cycle);
  injector_.accept(frame);
}

std::vector<EjectionFrame> Transactor::run_quantum(RunMode mode) {
  std::vector<EjectionFrame> frames;
  while (true) {
    if (mode == RunMode::UntilIdle && idle()) break;
    if (!halter_.tick()) break;
    const Cycle now = halter_.counter();
    ++safety_.cycles;
    if (now > halter_.injection_cycle()) ++safety_.bound_violations;

    injector_.release_due(now);
    scratch_.clear();
    injector_.collect(net_, scratch_);
    const auto completions = net_.step(scratch_);
    if (net_.cycle() != now) ++safety_.clock_skew;
    if (probe_) {
      for (const auto& c : completions) probe_(c);
    }

    if (auto frame = ejector_poll(net_, halter_, arbiter_)) {
      ++safety_.bursts;
      if (halter_.counter() != now) ++safety_.drain_time_moved;
      for (const Arrival& a : frame->arrivals) {
        if (a.arrival_cycle != frame->halt_cycle) ++safety_.stamp_violations;
      }
      if (frame->halt_cycle < last_halt_) ++safety_.order_violations;
      last_halt_ = frame->halt_cycle;
      frames.push_back(std::move(*frame));
    }
  }
  return frames;
}

}  // namespace emunoc::transactor
