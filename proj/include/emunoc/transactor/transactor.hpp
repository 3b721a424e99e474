// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "emunoc/noc/network.hpp"
#include "emunoc/transactor/clock_halter.hpp"
#include "emunoc/transactor/frames.hpp"

namespace emunoc::transactor {

/// Picks which ejection FIFO the serializer reads next. One slot per
/// (node, VC), row-major nodes then VCs. The pointer moves only once a drain
/// burst has finished, to one past the last slot read in that burst.
class RoundRobinArbiter {
 public:
  explicit RoundRobinArbiter(unsigned width);

  unsigned width() const { return width_; }
  unsigned pointer() const { return pointer_; }
  /// The k-th slot in grant order for the current burst.
  unsigned slot(unsigned k) const { return (pointer_ + k) % width_; }
  void finish_burst(unsigned last_granted);

 private:
  unsigned width_;
  unsigned pointer_ = 0;
};

/// Serial-to-parallel injector: holds accepted descriptors until the halter
/// counter reaches their injection cycle, then converts each into a packet in
/// its source PE's FIFO.
class Injector {
 public:
  explicit Injector(const noc::NocConfig& config);

  /// Throws Error{MalformedFrame} for out-of-range addresses or a length
  /// outside [1, packet_len].
  void validate(const InjectionFrame& frame) const;
  /// Validates and schedules a frame's descriptors.
  void accept(const InjectionFrame& frame);
  /// Moves descriptors due at or before `counter` into their PE FIFOs.
  void release_due(Cycle counter);
  /// This cycle's flit from every PE that has one and a VC with credit.
  void collect(const noc::Network& net, std::vector<noc::Injection>& out);

  bool idle() const;
  std::size_t scheduled() const;

 private:
  noc::NocConfig config_;
  std::map<Cycle, std::vector<PacketDescriptor>> schedule_;
  std::vector<noc::InjectionEndpoint> pes_;
};

/// Parallel-to-serial ejector. When any ejection FIFO holds a complete
/// packet, halts the clock, drains every complete packet in arbiter order,
/// and returns them stamped with the halted counter. Emulated time does not
/// move while draining.
std::optional<EjectionFrame> ejector_poll(noc::Network& net,
                                          ClockHalter& halter,
                                          RoundRobinArbiter& arbiter);

/// Counters for the synchronisation guarantees; any nonzero violation field
/// is a bug.
struct SafetyStats {
  std::uint64_t cycles = 0;
  std::uint64_t bursts = 0;
  std::uint64_t bound_violations = 0;    // counter passed the stored bound
  std::uint64_t stamp_violations = 0;    // arrival_cycle != halt_cycle
  std::uint64_t drain_time_moved = 0;    // counter changed across a burst
  std::uint64_t clock_skew = 0;          // halter counter != network cycle
  std::uint64_t order_violations = 0;    // halt cycles went backwards

  std::uint64_t violations() const {
    return bound_violations + stamp_violations + drain_time_moved +
           clock_skew + order_violations;
  }
  SafetyStats& operator+=(const SafetyStats& o);
};

enum class RunMode {
  UntilStopped,  // run to the stored injection cycle
  UntilIdle,     // additionally return once nothing is scheduled or in flight
};

/// The hardware side: emulated NoC plus clock halter, injector and ejector.
class Transactor {
 public:
  explicit Transactor(const noc::NocConfig& config);

  /// Stores the frame's quantum and schedules its descriptors.
  void accept(const InjectionFrame& frame);
  /// Executes emulated cycles until the halter stops (or the hardware goes
  /// idle in UntilIdle mode). Returns the ejection frames in order.
  std::vector<EjectionFrame> run_quantum(RunMode mode = RunMode::UntilStopped);

  bool idle() const { return net_.empty() && injector_.idle(); }

  const noc::Network& network() const { return net_; }
  const ClockHalter& halter() const { return halter_; }
  const RoundRobinArbiter& arbiter() const { return arbiter_; }
  const Injector& injector() const { return injector_; }
  const SafetyStats& safety() const { return safety_; }

  /// Sees every completion before it is drained (used for head latency).
  void set_completion_probe(std::function<void(const noc::Completion&)> probe) {
    probe_ = std::move(probe);
  }

 private:
  noc::Network net_;
  ClockHalter halter_;
  Injector injector_;
  RoundRobinArbiter arbiter_;
  SafetyStats safety_;
  Cycle last_halt_ = 0;
  std::vector<noc::Injection> scratch_;
  std::function<void(const noc::Completion&)> probe_;
};

}  // namespace emunoc::transactor
