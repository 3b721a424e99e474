// SPDX-License-Identifier: Apache-2.0

#include "emunoc/transactor/clock_halter.hpp"

#include <string>

namespace emunoc::transactor {

void ClockHalter::store(Cycle quantum) {
  if (quantum <= injection_cycle_) {
    throw Error(ErrorCode::NonMonotoneQuantum,
                "injection cycle " + std::to_string(quantum) +
                    " does not lie beyond the stored bound " +
                    std::to_string(injection_cycle_));
  }
  injection_cycle_ = quantum;
}

bool ClockHalter::tick() {
  if (halt_ || stopped()) return false;
  ++counter_;
  return true;
}

}  // namespace emunoc::transactor
