// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "emunoc/common.hpp"

namespace emunoc::transactor {

/// Gates the emulated clock. The counter advances one cycle per enabled tick
/// and never passes the stored injection cycle; while `halt` is asserted the
/// clock is frozen regardless of the bound.
class ClockHalter {
 public:
  Cycle counter() const { return counter_; }
  Cycle injection_cycle() const { return injection_cycle_; }
  bool halted() const { return halt_; }
  bool stopped() const { return counter_ == injection_cycle_; }

  /// Stores the next quantum bound. Throws Error{NonMonotoneQuantum} unless
  /// `quantum` lies strictly beyond the current bound.
  void store(Cycle quantum);

  /// One global-clock edge. Returns whether the emulated clock was enabled.
  bool tick();

  void set_halt(bool halt) { halt_ = halt; }

 private:
  Cycle counter_ = 0;
  Cycle injection_cycle_ = 0;
  bool halt_ = false;
};

}  // namespace emunoc::transactor
