// SPDX-License-Identifier: Apache-2.0

#include "emunoc/common.hpp"

namespace emunoc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return "invalid-config";
    case ErrorCode::ContractViolation: return "contract-violation";
    case ErrorCode::NonMonotoneQuantum: return "non-monotone-quantum";
    case ErrorCode::MalformedFrame: return "malformed-frame";
    case ErrorCode::UnknownPacket: return "unknown-packet-id";
    case ErrorCode::DuplicateArrival: return "duplicate-arrival";
    case ErrorCode::DependencyDeadlock: return "dependency-deadlock";
    case ErrorCode::InvalidRate: return "invalid-rate";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::CyclicDependency: return "cyclic-deps";
    case ErrorCode::DanglingDependency: return "dangling-dep-id";
    case ErrorCode::InvalidMapping: return "invalid-mapping";
    case ErrorCode::GridTooSmall: return "grid-too-small";
    case ErrorCode::Io: return "io-error";
  }
  return "unknown";
}

}  // namespace emunoc
