// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "emunoc/common.hpp"

namespace emunoc::noc {

enum class FlitKind : std::uint8_t { Head, Body, Tail };

/// The part of a packet the ejection PE keeps: everything except payload.
struct PacketHeader {
  PacketId id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint16_t len = 1;

  friend bool operator==(const PacketHeader&, const PacketHeader&) = default;
};

/// Flits carry no payload. A single-flit packet is a Head with `last` set.
struct Flit {
  PacketId packet_id = 0;
  FlitKind kind = FlitKind::Head;
  bool last = false;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint16_t len = 1;  // meaningful in the head only

  PacketHeader header() const { return {packet_id, src, dst, len}; }

  static Flit make(const PacketHeader& h, unsigned index) {
    Flit f;
    f.packet_id = h.id;
    f.src = h.src;
    f.dst = h.dst;
    f.len = h.len;
    f.last = index + 1 == h.len;
    if (index == 0) {
      f.kind = FlitKind::Head;
    } else {
      f.kind = f.last ? FlitKind::Tail : FlitKind::Body;
    }
    return f;
  }
};

}  // namespace emunoc::noc
