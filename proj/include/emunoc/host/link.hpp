// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <vector>

#include "emunoc/transactor/transactor.hpp"

namespace emunoc::host {

/// What the hardware returns for one injection frame.
struct QuantumResult {
  std::vector<transactor::EjectionFrame> frames;
  Cycle counter = 0;  // halter counter when the quantum ended
};

/// Host end of the host/hardware channel.
class Link {
 public:
  virtual ~Link() = default;
  virtual QuantumResult exchange(const transactor::InjectionFrame& frame,
                                 transactor::RunMode mode) = 0;
  /// Only valid once the run is over.
  virtual transactor::SafetyStats safety() = 0;
  /// Head-flit arrival cycle per packet id. Only valid once the run is over.
  virtual std::unordered_map<PacketId, Cycle> head_arrivals() = 0;
};

/// Calls the transactor directly on the host thread.
class InProcessLink final : public Link {
 public:
  explicit InProcessLink(const noc::NocConfig& config);

  QuantumResult exchange(const transactor::InjectionFrame& frame,
                         transactor::RunMode mode) override;
  transactor::SafetyStats safety() override { return hw_.safety(); }
  std::unordered_map<PacketId, Cycle> head_arrivals() override {
    return heads_;
  }

 private:
  transactor::Transactor hw_;
  std::unordered_map<PacketId, Cycle> heads_;
};

/// Runs the transactor on its own thread; frames cross through two ordered
/// queues, so the host only ever sees what the wire would carry.
class ThreadedLink final : public Link {
 public:
  explicit ThreadedLink(const noc::NocConfig& config);
  ~ThreadedLink() override;

  ThreadedLink(const ThreadedLink&) = delete;
  ThreadedLink& operator=(const ThreadedLink&) = delete;

  QuantumResult exchange(const transactor::InjectionFrame& frame,
                         transactor::RunMode mode) override;
  transactor::SafetyStats safety() override;
  std::unordered_map<PacketId, Cycle> head_arrivals() override;

 private:
  template <typename T>
  class Queue {
   public:
    void push(T item) {
      {
        std::lock_guard lock(mu_);
        items_.push_back(std::move(item));
      }
      cv_.notify_one();
    }
    T pop() {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [this] { return !items_.empty(); });
      T item = std::move(items_.front());
      items_.pop_front();
      return item;
    }

   private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<T> items_;
  };

  struct Request {
    bool shutdown = false;
    transactor::InjectionFrame frame;
    transactor::RunMode mode = transactor::RunMode::UntilStopped;
  };
  struct Reply {
    bool done = false;  // ends the reply stream for one request
    transactor::EjectionFrame frame;
    Cycle counter = 0;
    std::exception_ptr error;
  };

  void serve();
  void shutdown();

  transactor::Transactor hw_;
  std::unordered_map<PacketId, Cycle> heads_;
  Queue<Request> requests_;
  Queue<Reply> replies_;
  std::thread worker_;
};

}  // namespace emunoc::host
