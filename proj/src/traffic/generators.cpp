// SPDX-License-Identifier: Apache-2.0

#include "emunoc/traffic/generators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iterator>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "emunoc/traffic/random.hpp"

namespace emunoc::traffic {

EventList uniform_random(const noc::NocConfig& config, double flit_rate,
                         Cycle duration, std::uint64_t seed) {
  noc::validate(config);
  if (!(flit_rate >= 0.0 && flit_rate <= 1.0)) {
    throw Error(ErrorCode::InvalidRate,
                "flit_rate " + std::to_string(flit_rate) +
                    " outside [0, 1]");
  }
  EventList events;
  if (flit_rate == 0.0 || duration == 0) return events;
  const unsigned nodes = config.node_count();
  if (nodes < 2) {
    throw Error(ErrorCode::InvalidConfig,
                "uniform traffic needs at least two nodes");
  }
  const double packet_rate = flit_rate / config.packet_len;
  Rng rng(seed);
  for (Cycle cycle = 0; cycle < duration; ++cycle) {
    for (NodeId src = 0; src < nodes; ++src) {
      if (!rng.bernoulli(packet_rate)) continue;
      auto dst = static_cast<NodeId>(rng.below(nodes - 1));
      if (dst >= src) ++dst;
      TrafficEvent e;
      e.id = static_cast<PacketId>(events.size());
      e.icyc = cycle;
      e.src = src;
      e.dst = dst;
      e.len = static_cast<std::uint16_t>(config.packet_len);
      events.push_back(std::move(e));
    }
  }
  return events;
}

double cnn_irate(double map_neurons, double sparsity, double framerate,
                 double noc_frequency) {
  const double inputs[] = {map_neurons, sparsity, framerate, noc_frequency};
  if (!std::all_of(std::begin(inputs), std::end(inputs),
                   [](double v) { return std::isfinite(v); })) {
    return map_neurons * (1.0 - sparsity) * framerate / noc_frequency;
  }
  // Each input is read back as its shortest decimal form (what a config file
  // holds), so 1 - 0.9 is exactly 0.1, and the result is rounded once.
  using Wide = boost::multiprecision::cpp_bin_float_100;
  const auto wide = [](double v) {
    char buf[32];
    const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
    return Wide(std::string(buf, end));
  };
  const Wide r = wide(map_neurons) * (Wide(1) - wide(sparsity)) *
                 wide(framerate) / wide(noc_frequency);
  return r.convert_to<double>();
}

EventList cnn_traffic(const CnnMapping& mapping, double sparsity,
                      Cycle duration, std::uint64_t seed,
                      unsigned packet_len) {
  const auto nodes = static_cast<unsigned>(mapping.cores.size());
  validate(mapping, nodes);
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
    throw Error(ErrorCode::InvalidRate,
                "sparsity " + std::to_string(sparsity) + " outside [0, 1]");
  }
  if (packet_len == 0 || packet_len > 0xFFFF) {
    throw Error(ErrorCode::InvalidConfig, "packet_len outside [1, 65535]");
  }
  std::vector<double> rate(nodes, 0.0);
  for (NodeId n = 0; n < nodes; ++n) {
    const CoreAssignment& core = mapping.cores[n];
    if (core.dests.empty()) continue;
    rate[n] = cnn_irate(static_cast<double>(core.map_neurons), sparsity,
                        mapping.framerate, mapping.noc_frequency);
    if (rate[n] > 1.0) {
      throw Error(ErrorCode::InvalidRate,
                  "core " + std::to_string(n) + " needs " +
                      std::to_string(rate[n]) +
                      " packets per cycle; at most one can start");
    }
  }

  EventList events;
  Rng rng(seed);
  for (Cycle cycle = 0; cycle < duration; ++cycle) {
    for (NodeId src = 0; src < nodes; ++src) {
      const double start = rng.uniform();
      const double pick = rng.uniform();
      if (start >= rate[src]) continue;
      const auto& dests = mapping.cores[src].dests;
      const auto k = std::min<std::size_t>(
          static_cast<std::size_t>(pick * static_cast<double>(dests.size())),
          dests.size() - 1);
      TrafficEvent e;
      e.id = static_cast<PacketId>(events.size());
      e.icyc = cycle;
      e.src = src;
      e.dst = dests[k];
      e.len = static_cast<std::uint16_t>(packet_len);
      events.push_back(std::move(e));
    }
  }
  return events;
}

}  // namespace emunoc::traffic
