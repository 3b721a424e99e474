// SPDX-License-Identifier: Apache-2.0

#include "emunoc/traffic/mapping.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

namespace emunoc::traffic {

namespace {

unsigned distance(NodeId a, NodeId b, unsigned width) {
  const unsigned ax = a % width, ay = a / width;
  const unsigned bx = b % width, by = b / width;
  return (ax > bx ? ax - bx : bx - ax) + (ay > by ? ay - by : by - ay);
}

std::vector<NodeId> snake_order(unsigned width, unsigned height) {
  std::vector<NodeId> order;
  order.reserve(std::size_t{width} * height);
  for (unsigned y = 0; y < height; ++y) {
    for (unsigned i = 0; i < width; ++i) {
      const unsigned x = (y % 2 == 0) ? i : width - 1 - i;
      order.push_back(y * width + x);
    }
  }
  return order;
}

struct LayerPlan {
  std::vector<std::vector<std::uint64_t>> neurons;  // per layer, per core
  std::size_t total_cores = 0;
};

LayerPlan plan_layers(const std::vector<std::uint64_t>& layer_sizes,
                      unsigned width, unsigned height,
                      std::uint64_t neurons_per_core) {
  if (width == 0 || height == 0) {
    throw Error(ErrorCode::InvalidMapping, "grid must be at least 1x1");
  }
  if (neurons_per_core == 0) {
    throw Error(ErrorCode::InvalidMapping, "neurons_per_core must be >= 1");
  }
  if (layer_sizes.empty()) {
    throw Error(ErrorCode::InvalidMapping, "at least one layer is required");
  }
  LayerPlan plan;
  for (std::size_t l = 0; l < layer_sizes.size(); ++l) {
    const std::uint64_t size = layer_sizes[l];
    if (size == 0) {
      throw Error(ErrorCode::InvalidMapping,
                  "layer " + std::to_string(l) + " has no neurons");
    }
    const std::uint64_t cores = (size + neurons_per_core - 1) / neurons_per_core;
    std::vector<std::uint64_t> per_core(cores, neurons_per_core);
    per_core.back() = size - (cores - 1) * neurons_per_core;
    plan.total_cores += cores;
    plan.neurons.push_back(std::move(per_core));
  }
  const std::size_t grid = std::size_t{width} * height;
  if (plan.total_cores > grid) {
    throw Error(ErrorCode::GridTooSmall,
                std::to_string(plan.total_cores) + " cores needed, " +
                    std::to_string(grid) + " available");
  }
  return plan;
}

CnnMapping assemble(const LayerPlan& plan,
                    const std::vector<std::vector<NodeId>>& placement,
                    unsigned width, unsigned height) {
  CnnMapping m;
  m.cores.resize(std::size_t{width} * height);
  for (std::size_t l = 0; l < placement.size(); ++l) {
    for (std::size_t j = 0; j < placement[l].size(); ++j) {
      CoreAssignment& core = m.cores[placement[l][j]];
      core.map_neurons = plan.neurons[l][j];
      if (l + 1 < placement.size()) core.dests = placement[l + 1];
    }
  }
  return m;
}

[[noreturn]] void parse_error(const std::string& source, std::size_t line,
                              const std::string& what) {
  throw Error(ErrorCode::ParseError,
              source + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(const std::string& text, const std::string& source,
               std::size_t line, const std::string& key) {
  std::istringstream is(text);
  T value{};
  if (!(is >> value) || !is.eof()) {
    parse_error(source, line, "bad value '" + text + "' for " + key);
  }
  return value;
}

}  // namespace

void validate(const CnnMapping& mapping, unsigned nodes) {
  if (mapping.cores.size() > nodes) {
    throw Error(ErrorCode::InvalidMapping,
                "mapping covers " + std::to_string(mapping.cores.size()) +
                    " cores but the mesh has " + std::to_string(nodes));
  }
  if (!(mapping.framerate >= 0.0)) {
    throw Error(ErrorCode::InvalidMapping, "framerate must be >= 0");
  }
  if (!(mapping.noc_frequency > 0.0)) {
    throw Error(ErrorCode::InvalidMapping, "frequency must be > 0");
  }
  for (NodeId n = 0; n < mapping.cores.size(); ++n) {
    const CoreAssignment& core = mapping.cores[n];
    if (core.map_neurons == 0 && !core.dests.empty()) {
      throw Error(ErrorCode::InvalidMapping,
                  "core " + std::to_string(n) + " has dests but no neurons");
    }
    for (NodeId d : core.dests) {
      if (d >= nodes) {
        throw Error(ErrorCode::InvalidMapping,
                    "core " + std::to_string(n) + " sends to node " +
                        std::to_string(d) + " outside the mesh");
      }
      if (d == n) {
        throw Error(ErrorCode::InvalidMapping,
                    "core " + std::to_string(n) + " sends to itself");
      }
    }
  }
}

CnnMapping snake_mapping(const std::vector<std::uint64_t>& layer_sizes,
                         unsigned width, unsigned height,
                         std::uint64_t neurons_per_core) {
  const LayerPlan plan =
      plan_layers(layer_sizes, width, height, neurons_per_core);
  const std::vector<NodeId> order = snake_order(width, height);
  std::vector<std::vector<NodeId>> placement;
  std::size_t next = 0;
  for (const auto& layer : plan.neurons) {
    std::vector<NodeId> nodes;
    for (std::size_t j = 0; j < layer.size(); ++j) nodes.push_back(order[next++]);
    placement.push_back(std::move(nodes));
  }
  return assemble(plan, placement, width, height);
}

CnnMapping locality_mapping(const std::vector<std::uint64_t>& layer_sizes,
                            unsigned width, unsigned height,
                            std::uint64_t neurons_per_core) {
  const LayerPlan plan =
      plan_layers(layer_sizes, width, height, neurons_per_core);
  const std::size_t grid = std::size_t{width} * height;
  const std::vector<NodeId> order = snake_order(width, height);
  std::vector<bool> used(grid, false);
  std::vector<std::vector<NodeId>> placement(plan.neurons.size());

  for (std::size_t j = 0; j < plan.neurons[0].size(); ++j) {
    placement[0].push_back(order[j]);
    used[order[j]] = true;
  }
  for (std::size_t l = 1; l < plan.neurons.size(); ++l) {
    const auto& prev = placement[l - 1];
    const auto& prev_weight = plan.neurons[l - 1];
    for (std::size_t j = 0; j < plan.neurons[l].size(); ++j) {
      NodeId best = 0;
      std::uint64_t best_pull = std::numeric_limits<std::uint64_t>::max();
      std::uint64_t best_spread = std::numeric_limits<std::uint64_t>::max();
      for (NodeId n = 0; n < grid; ++n) {
        if (used[n]) continue;
        std::uint64_t pull = 0;
        for (std::size_t k = 0; k < prev.size(); ++k) {
          pull += prev_weight[k] * distance(n, prev[k], width);
        }
        std::uint64_t spread = 0;
        for (NodeId peer : placement[l]) spread += distance(n, peer, width);
        if (pull < best_pull || (pull == best_pull && spread < best_spread)) {
          best = n;
          best_pull = pull;
          best_spread = spread;
        }
      }
      placement[l].push_back(best);
      used[best] = true;
    }
  }
  return assemble(plan, placement, width, height);
}

double weighted_hop_count(const CnnMapping& mapping, unsigned width) {
  double total = 0.0;
  for (NodeId n = 0; n < mapping.cores.size(); ++n) {
    const CoreAssignment& core = mapping.cores[n];
    if (core.dests.empty()) continue;
    std::uint64_t hops = 0;
    for (NodeId d : core.dests) hops += distance(n, d, width);
    total += static_cast<double>(core.map_neurons) *
             static_cast<double>(hops) / static_cast<double>(core.dests.size());
  }
  return total;
}

CnnMapping parse_mapping(std::istream& in, const std::string& source) {
  CnnMapping m;
  std::vector<bool> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = raw.substr(0, raw.find('#'));
    std::istringstream tokens(text);
    std::string token;
    std::optional<NodeId> node;
    std::optional<std::uint64_t> neurons;
    std::vector<NodeId> dests;
    bool has_dests = false;
    bool any = false;
    while (tokens >> token) {
      any = true;
      const auto eq = token.find('=');
      if (eq == std::string::npos) {
        parse_error(source, line, "expected key=value, got '" + token + "'");
      }
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      if (key == "framerate") {
        m.framerate = parse_number<double>(value, source, line, key);
      } else if (key == "frequency") {
        m.noc_frequency = parse_number<double>(value, source, line, key);
      } else if (key == "node") {
        node = parse_number<NodeId>(value, source, line, key);
      } else if (key == "neurons") {
        neurons = parse_number<std::uint64_t>(value, source, line, key);
      } else if (key == "dests") {
        has_dests = true;
        std::istringstream list(value);
        std::string item;
        while (std::getline(list, item, ',')) {
          if (item.empty()) continue;
          dests.push_back(parse_number<NodeId>(item, source, line, key));
        }
      } else {
        parse_error(source, line, "unknown key '" + key + "'");
      }
    }
    if (!any) continue;
    if (node || neurons || has_dests) {
      if (!node || !neurons) {
        parse_error(source, line, "a core line needs node= and neurons=");
      }
      if (*node >= m.cores.size()) {
        m.cores.resize(*node + 1);
        seen.resize(*node + 1, false);
      }
      if (seen[*node]) {
        parse_error(source, line, "node " + std::to_string(*node) +
                                      " declared twice");
      }
      seen[*node] = true;
      m.cores[*node] = {*neurons, std::move(dests)};
    }
  }
  return m;
}

CnnMapping load_mapping(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open mapping file " + path.string());
  }
  return parse_mapping(in, path.string());
}

void write_mapping(const CnnMapping& mapping, std::ostream& out) {
  std::ostringstream rates;
  rates << std::setprecision(17) << "framerate=" << mapping.framerate
        << "\nfrequency=" << mapping.noc_frequency << '\n';
  out << rates.str();
  for (NodeId n = 0; n < mapping.cores.size(); ++n) {
    const CoreAssignment& core = mapping.cores[n];
    if (core.map_neurons == 0 && core.dests.empty()) continue;
    out << "node=" << n << " neurons=" << core.map_neurons << " dests=";
    for (std::size_t i = 0; i < core.dests.size(); ++i) {
      out << (i ? "," : "") << core.dests[i];
    }
    out << '\n';
  }
}

}  // namespace emunoc::traffic
