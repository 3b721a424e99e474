// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "emunoc/noc/config.hpp"
#include "emunoc/traffic/event.hpp"
#include "emunoc/traffic/mapping.hpp"

namespace emunoc::traffic {

/// Uniform random traffic. In every cycle of [0, duration) each node starts a
/// packet of config.packet_len flits with probability flit_rate / packet_len,
/// so the offered load is flit_rate flits per node per cycle. Destinations
/// are uniform over the other nodes. Events come out sorted by cycle, then
/// source, with ids 0, 1, 2, ...
///
/// Throws Error{InvalidRate} unless 0 <= flit_rate <= 1, and
/// Error{InvalidConfig} for a nonzero rate on a single-node mesh.
EventList uniform_random(const noc::NocConfig& config, double flit_rate,
                         Cycle duration, std::uint64_t seed);

/// Packet-start probability per core per cycle for a core holding
/// `map_neurons` neurons: neurons * (1 - sparsity) * framerate / frequency,
/// evaluated exactly on the shortest decimal form of each argument and
/// rounded once, so (1000, 0.9, 30, 1e9) gives exactly 3e-6.
double cnn_irate(double map_neurons, double sparsity, double framerate,
                 double noc_frequency);

/// Feed-forward CNN activation traffic. Each core with downstream cores
/// starts a packet with probability cnn_irate(...) per cycle, addressed to
/// one of its dests chosen uniformly. No dependencies.
///
/// Each (cycle, node) consumes the same two random draws whatever the
/// sparsity, so for one seed the packets at a higher sparsity are a subset of
/// those at a lower one.
EventList cnn_traffic(const CnnMapping& mapping, double sparsity,
                      Cycle duration, std::uint64_t seed,
                      unsigned packet_len);

}  // namespace emunoc::traffic
