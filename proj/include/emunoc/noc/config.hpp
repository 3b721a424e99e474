// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "emunoc/common.hpp"

namespace emunoc::noc {

/// Largest VC count representable in a VcMask.
inline constexpr unsigned kMaxVcs = 64;

struct NocConfig {
  unsigned width = 5;
  unsigned height = 5;
  unsigned num_vcs = 2;
  unsigned buffer_depth = 8;
  // Cycles from a flit's arrival in an input buffer to its departure on the
  // output link at zero load.
  unsigned router_delay = 2;
  // Also the maximum packet length and the depth of every ejection-NI FIFO.
  unsigned packet_len = 5;
  std::uint64_t seed = 1;

  unsigned node_count() const { return width * height; }
  unsigned ejection_fifo_depth() const { return packet_len; }
};

/// Throws Error{InvalidConfig} naming the offending field.
void validate(const NocConfig& config);

struct Coord {
  unsigned x;
  unsigned y;
  friend bool operator==(const Coord&, const Coord&) = default;
};

// Nodes are numbered row-major: node = y * width + x.
inline Coord coord_of(NodeId node, const NocConfig& config) {
  return {node % config.width, node / config.width};
}

inline NodeId node_of(Coord c, const NocConfig& config) {
  return c.y * config.width + c.x;
}

unsigned manhattan(NodeId a, NodeId b, const NocConfig& config);

}  // namespace emunoc::noc
