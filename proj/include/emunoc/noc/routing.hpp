// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "emunoc/noc/config.hpp"

namespace emunoc::noc {

// North is +y, East is +x.
enum class Port : std::uint8_t { Local = 0, East, West, North, South };

inline constexpr unsigned kNumPorts = 5;
inline constexpr std::array<Port, kNumPorts> kAllPorts = {
    Port::Local, Port::East, Port::West, Port::North, Port::South};

inline constexpr unsigned index(Port p) { return static_cast<unsigned>(p); }

constexpr Port opposite(Port p) {
  switch (p) {
    case Port::East: return Port::West;
    case Port::West: return Port::East;
    case Port::North: return Port::South;
    case Port::South: return Port::North;
    case Port::Local: return Port::Local;
  }
  return Port::Local;
}

std::string_view to_string(Port p);

/// X-first dimension-ordered routing.
Port route_xy(NodeId current, NodeId dst, const NocConfig& config);

/// Node reached through `p`; nullopt when `p` leaves the mesh or is Local.
std::optional<NodeId> neighbour(NodeId node, Port p, const NocConfig& config);

}  // namespace emunoc::noc
