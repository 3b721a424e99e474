// SPDX-License-Identifier: Apache-2.0

#include "emunoc/noc/routing.hpp"

#include <string>

namespace emunoc::noc {

void validate(const NocConfig& config) {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) {
      throw Error(ErrorCode::InvalidConfig,
                  std::string("noc.") + field + ": " + what);
    }
  };
  require(config.width >= 1, "width", "must be >= 1");
  require(config.height >= 1, "height", "must be >= 1");
  require(config.num_vcs >= 1, "num_vcs", "must be >= 1");
  require(config.num_vcs <= kMaxVcs, "num_vcs", "must be <= 64");
  require(config.buffer_depth >= 1, "buffer_depth", "must be >= 1");
  require(config.router_delay >= 1, "router_delay", "must be >= 1");
  require(config.packet_len >= 1, "packet_len", "must be >= 1");
  require(config.packet_len <= 0xFFFF, "packet_len", "must fit in 16 bits");
  require(static_cast<std::uint64_t>(config.width) * config.height <= 0x10000,
          "width", "mesh larger than 65536 nodes cannot be addressed");
}

unsigned manhattan(NodeId a, NodeId b, const NocConfig& config) {
  const Coord ca = coord_of(a, config);
  const Coord cb = coord_of(b, config);
  const unsigned dx = ca.x > cb.x ? ca.x - cb.x : cb.x - ca.x;
  const unsigned dy = ca.y > cb.y ? ca.y - cb.y : cb.y - ca.y;
  return dx + dy;
}

std::string_view to_string(Port p) {
  switch (p) {
    case Port::Local: return "Local";
    case Port::East: return "East";
    case Port::West: return "West";
    case Port::North: return "North";
    case Port::South: return "South";
  }
  return "?";
}

Port route_xy(NodeId current, NodeId dst, const NocConfig& config) {
  const Coord c = coord_of(current, config);
  const Coord d = coord_of(dst, config);
  if (d.x > c.x) return Port::East;
  if (d.x < c.x) return Port::West;
  if (d.y > c.y) return Port::North;
  if (d.y < c.y) return Port::South;
  return Port::Local;
}

std::optional<NodeId> neighbour(NodeId node, Port p, const NocConfig& config) {
  const Coord c = coord_of(node, config);
  switch (p) {
    case Port::East:
      if (c.x + 1 < config.width) return node_of({c.x + 1, c.y}, config);
      break;
    case Port::West:
      if (c.x > 0) return node_of({c.x - 1, c.y}, config);
      break;
    case Port::North:
      if (c.y + 1 < config.height) return node_of({c.x, c.y + 1}, config);
      break;
    case Port::South:
      if (c.y > 0) return node_of({c.x, c.y - 1}, config);
      break;
    case Port::Local:
      break;
  }
  return std::nullopt;
}

}  // namespace emunoc::noc
