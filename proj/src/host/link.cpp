// SPDX-License-Identifier: Apache-2.0

#include "emunoc/host/link.hpp"

namespace emunoc::host {

InProcessLink::InProcessLink(const noc::NocConfig& config) : hw_(config) {
  hw_.set_completion_probe([this](const noc::Completion& c) {
    heads_.emplace(c.header.id, c.head_arrival_cycle);
  });
}

QuantumResult InProcessLink::exchange(const transactor::InjectionFrame& frame,
                                      transactor::RunMode mode) {
  hw_.accept(frame);
  QuantumResult r;
  r.frames = hw_.run_quantum(mode);
  r.counter = hw_.halter().counter();
  return r;
}

ThreadedLink::ThreadedLink(const noc::NocConfig& config) : hw_(config) {
  hw_.set_completion_probe([this](const noc::Completion& c) {
    heads_.emplace(c.header.id, c.head_arrival_cycle);
  });
  worker_ = std::thread([this] { serve(); });
}

ThreadedLink::~ThreadedLink() { shutdown(); }

void ThreadedLink::shutdown() {
  if (!worker_.joinable()) return;
  requests_.push(Request{true, {}, {}});
  worker_.join();
}

void ThreadedLink::serve() {
  while (true) {
    Request req = requests_.pop();
    if (req.shutdown) return;
    Reply done;
    done.done = true;
    try {
      hw_.accept(req.frame);
      for (auto& f : hw_.run_quantum(req.mode)) {
        Reply r;
        r.frame = std::move(f);
        replies_.push(std::move(r));
      }
    } catch (...) {
      done.error = std::current_exception();
    }
    done.counter = hw_.halter().counter();
    replies_.push(std::move(done));
  }
}

QuantumResult ThreadedLink::exchange(const transactor::InjectionFrame& frame,
                                     transactor::RunMode mode) {
  requests_.push(Request{false, frame, mode});
  QuantumResult r;
  while (true) {
    Reply reply = replies_.pop();
    if (!reply.done) {
      r.frames.push_back(std::move(reply.frame));
      continue;
    }
    if (reply.error) std::rethrow_exception(reply.error);
    r.counter = reply.counter;
    return r;
  }
}

transactor::SafetyStats ThreadedLink::safety() {
  shutdown();
  return hw_.safety();
}

std::unordered_map<PacketId, Cycle> ThreadedLink::head_arrivals() {
  shutdown();
  return heads_;
}

}  // namespace emunoc::host
