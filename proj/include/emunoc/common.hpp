// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace emunoc {

using Cycle = std::uint64_t;
using NodeId = std::uint32_t;
using PacketId = std::uint32_t;

enum class ErrorCode {
  InvalidConfig,
  ContractViolation,
  NonMonotoneQuantum,
  MalformedFrame,
  UnknownPacket,
  DuplicateArrival,
  DependencyDeadlock,
  InvalidRate,
  ParseError,
  CyclicDependency,
  DanglingDependency,
  InvalidMapping,
  GridTooSmall,
  Io,
};

std::string_view to_string(ErrorCode code);

/// All recoverable and contract errors raised by the library carry a code so
/// callers (and tests) can branch on the failure kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace emunoc
