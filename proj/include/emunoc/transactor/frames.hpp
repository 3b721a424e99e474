// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "emunoc/common.hpp"

namespace emunoc::transactor {

struct PacketDescriptor {
  PacketId id = 0;
  std::uint16_t src = 0;
  std::uint16_t dst = 0;
  std::uint16_t len = 0;

  friend bool operator==(const PacketDescriptor&,
                         const PacketDescriptor&) = default;
};

/// Host -> hardware. Grants emulation up to `injection_cycle`, at which the
/// descriptors are handed to their source PEs. An empty descriptor list is a
/// pure time advance.
struct InjectionFrame {
  Cycle injection_cycle = 0;
  std::vector<PacketDescriptor> descriptors;

  friend bool operator==(const InjectionFrame&, const InjectionFrame&) = default;
};

struct Arrival {
  PacketId id = 0;
  std::uint16_t src = 0;
  std::uint16_t dst = 0;
  std::uint16_t len = 0;
  Cycle arrival_cycle = 0;

  friend bool operator==(const Arrival&, const Arrival&) = default;
};

/// Hardware -> host. One per halt burst.
struct EjectionFrame {
  Cycle halt_cycle = 0;
  std::vector<Arrival> arrivals;

  friend bool operator==(const EjectionFrame&, const EjectionFrame&) = default;
};

// Little-endian wire format.
//   InjectionFrame: u64 injection_cycle, u32 count,
//                   count x (u32 id, u16 src, u16 dst, u16 len, u16 pad=0)
//   EjectionFrame:  u64 halt_cycle, u32 count,
//                   count x (u32 id, u16 src, u16 dst, u16 len, u16 pad=0,
//                            u64 arrival_cycle)
inline constexpr std::size_t kFrameHeaderBytes = 12;
inline constexpr std::size_t kDescriptorBytes = 12;
inline constexpr std::size_t kArrivalBytes = 20;

void encode(const InjectionFrame& frame, std::vector<std::uint8_t>& out);
void encode(const EjectionFrame& frame, std::vector<std::uint8_t>& out);

/// Decoders consume one frame from the front of `bytes` and advance it.
/// Truncated input or a nonzero pad throws Error{MalformedFrame}.
InjectionFrame decode_injection(std::span<const std::uint8_t>& bytes);
EjectionFrame decode_ejection(std::span<const std::uint8_t>& bytes);

/// Byte sink for a run's frames, in the order they crossed the boundary.
class FrameLog {
 public:
  void record(const InjectionFrame& frame) { encode(frame, bytes_); }
  void record(const EjectionFrame& frame) { encode(frame, bytes_); }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  void write(std::ostream& os) const;

 private:
  std::vector<std::uint8_t> bytes_;
};

}  // namespace emunoc::transactor
