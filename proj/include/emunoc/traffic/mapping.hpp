// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "emunoc/noc/config.hpp"

namespace emunoc::traffic {

struct CoreAssignment {
  std::uint64_t map_neurons = 0;
  std::vector<NodeId> dests;  // cores holding the next layer; empty for output

  friend bool operator==(const CoreAssignment&, const CoreAssignment&) = default;
};

/// Placement of a layered network onto mesh cores. `cores` is indexed by node.
struct CnnMapping {
  std::vector<CoreAssignment> cores;
  double framerate = 30.0;
  double noc_frequency = 1e9;

  friend bool operator==(const CnnMapping&, const CnnMapping&) = default;
};

/// Throws Error{InvalidMapping} unless every dest names a core inside
/// `nodes`, no core sends to itself, cores without neurons have no dests,
/// framerate >= 0 and noc_frequency > 0.
void validate(const CnnMapping& mapping, unsigned nodes);

/// Places layers on cores in boustrophedon order: row 0 left to right, row 1
/// right to left, and so on. Each layer takes ceil(size / neurons_per_core)
/// consecutive cores; every core of a layer sends to every core of the next.
/// Throws Error{GridTooSmall} when the cores do not fit.
CnnMapping snake_mapping(const std::vector<std::uint64_t>& layer_sizes,
                         unsigned width, unsigned height,
                         std::uint64_t neurons_per_core);

/// Greedy locality placement. The first layer sits in snake order; each core
/// of a later layer takes the free node with the smallest traffic-weighted
/// Manhattan distance to the previous layer's cores, ties broken by distance
/// to its own layer, then by node index.
CnnMapping locality_mapping(const std::vector<std::uint64_t>& layer_sizes,
                            unsigned width, unsigned height,
                            std::uint64_t neurons_per_core);

/// Expected hops per unit of injected traffic summed over all cores: each
/// core contributes map_neurons times the mean Manhattan distance to its
/// dests.
double weighted_hop_count(const CnnMapping& mapping, unsigned width);

// Text format, one directive per line, '#' starts a comment:
//   framerate=<f>
//   frequency=<hz>
//   node=<i> neurons=<n> dests=<j,k,...>
CnnMapping parse_mapping(std::istream& in, const std::string& source);
CnnMapping load_mapping(const std::filesystem::path& path);
void write_mapping(const CnnMapping& mapping, std::ostream& out);

}  // namespace emunoc::traffic
