// SPDX-License-Identifier: Apache-2.0

#include "emunoc/host/host.hpp"

#include <chrono>
#include <memory>

#include <spdlog/spdlog.h>

#include "emunoc/host/link.hpp"
#include "emunoc/host/virtual_buffer.hpp"

namespace emunoc::host {

RunReport run(const noc::NocConfig& config, const traffic::EventList& events,
              const RunOptions& options) {
  noc::validate(config);
  traffic::validate_events(events, config.node_count(), config.packet_len);

  std::unique_ptr<Link> link;
  if (options.link == LinkKind::Threaded) {
    link = std::make_unique<ThreadedLink>(config);
  } else {
    link = std::make_unique<InProcessLink>(config);
  }
  VirtualBuffer buffer(events);
  RunReport report;

  const auto start = std::chrono::steady_clock::now();
  Cycle now = 0;
  while (true) {
    Plan plan = buffer.advance(now, options.max_cycle);
    if (auto* stop = std::get_if<Stop>(&plan)) {
      report.truncated = stop->truncated;
      break;
    }
    auto& q = std::get<Quantum>(plan);
    const auto frame = buffer.send_quantum(q.batch, q.cycle);
    if (options.log) options.log->record(frame);
    ++report.injection_frames;
    spdlog::trace("quantum {} with {} packets", frame.injection_cycle,
                  frame.descriptors.size());

    QuantumResult result = link->exchange(frame, q.mode);
    for (const auto& ej : result.frames) {
      if (options.log) options.log->record(ej);
      buffer.match_received(ej);
      ++report.ejection_frames;
    }
    now = result.counter;
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  report.safety = link->safety();
  report.cycles = now;
  const auto heads = link->head_arrivals();
  report.packets.reserve(buffer.size());
  for (PacketId id = 0; id < buffer.size(); ++id) {
    const BufferEntry& e = buffer.entry(id);
    metrics::PacketRecord r;
    r.id = id;
    r.src = e.event.src;
    r.dst = e.event.dst;
    r.len = e.event.len;
    r.icyc = e.event.icyc;
    r.injected = e.injected;
    r.arrived = e.arrived;
    if (e.arrived) {
      ++report.delivered;
      if (auto it = heads.find(id); it != heads.end()) {
        r.head_arrived = it->second;
      }
    }
    report.packets.push_back(r);
  }
  if (report.truncated) {
    spdlog::warn("stopped at max_cycle {}: {} of {} packets delivered",
                 options.max_cycle, report.delivered, buffer.size());
  }
  return report;
}

}  // namespace emunoc::host
