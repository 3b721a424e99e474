// SPDX-License-Identifier: Apache-2.0

#include "emunoc/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace emunoc::cli {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "noc.width",          "noc.height",        "noc.num_vcs",
      "noc.buffer_depth",   "noc.router_delay",  "noc.packet_len",
      "noc.seed",           "traffic.kind",      "traffic.flit_rate",
      "traffic.duration",   "traffic.trace",     "traffic.mapping",
      "traffic.layers",     "traffic.neurons_per_core",
      "traffic.sparsity",   "traffic.framerate", "traffic.frequency",
      "run.max_cycle",      "run.link",          "output.dir",
      "output.timing",      "output.frame_log",  "sweep.variable",
      "sweep.values",       "sweep.jobs",
  };
  return keys;
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, key + ": " + what);
}

std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

template <typename T>
T to_integer(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    bad(key, "expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

double to_double(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  is.imbue(std::locale::classic());
  double value = 0.0;
  if (!(is >> value) || !(is >> std::ws).eof() || !std::isfinite(value)) {
    bad(key, "expected a number, got '" + text + "'");
  }
  return value;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") {
    return true;
  }
  if (text == "false" || text == "0" || text == "no" || text == "off") {
    return false;
  }
  bad(key, "expected true or false, got '" + text + "'");
}

unsigned to_unsigned(const std::string& key, const std::string& text) {
  const auto v = to_integer<std::uint64_t>(key, text);
  if (v > 0xFFFFFFFFu) bad(key, "value " + text + " is too large");
  return static_cast<unsigned>(v);
}

/// Flat view over the tree: dotted key -> trimmed value.
class Keys {
 public:
  explicit Keys(const pt::ptree& tree) {
    for (const auto& [section, body] : tree) {
      if (body.empty()) {
        bad(section, "keys must live in a [section]");
      }
      for (const auto& [name, leaf] : body) {
        const std::string key = section + "." + name;
        if (!known_keys().contains(key)) bad(key, "unknown key");
        values_[key] = trim(leaf.data());
      }
    }
  }

  void set(const std::string& key, const std::string& value) {
    if (!known_keys().contains(key)) bad(key, "unknown key");
    values_[key] = trim(value);
  }

  std::optional<std::string> find(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string require(const std::string& key) const {
    auto v = find(key);
    if (!v) bad(key, "missing required key");
    if (v->empty()) bad(key, "empty value");
    return *v;
  }

 private:
  std::map<std::string, std::string> values_;
};

std::size_t decimals(const std::string& text) {
  const auto dot = text.find('.');
  return dot == std::string::npos ? 0 : text.size() - dot - 1;
}

}  // namespace

const char* to_string(TrafficKind kind) {
  switch (kind) {
    case TrafficKind::Uniform: return "uniform";
    case TrafficKind::Trace: return "trace";
    case TrafficKind::Cnn: return "cnn";
  }
  return "?";
}

const char* to_string(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::Sparsity: return "sparsity";
    case SweepVariable::FlitRate: return "flit_rate";
    case SweepVariable::MeshSize: return "mesh_size";
  }
  return "?";
}

Override parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::InvalidConfig,
                "--set: expected key=value, got '" + text + "'");
  }
  Override o{trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
  if (o.key.find('.') == std::string::npos) {
    throw Error(ErrorCode::InvalidConfig,
                "--set " + o.key + ": key must be section.name");
  }
  return o;
}

std::vector<std::string> expand_values(const std::string& key,
                                       const std::string& text) {
  std::vector<std::string> out;
  std::istringstream list(text);
  std::string item;
  while (std::getline(list, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (std::count(item.begin(), item.end(), ':') != 2) {
      to_double(key, item);
      out.push_back(item);
      continue;
    }
    const auto c1 = item.find(':');
    const auto c2 = item.find(':', c1 + 1);
    const std::string a = trim(item.substr(0, c1));
    const std::string b = trim(item.substr(c1 + 1, c2 - c1 - 1));
    const std::string s = trim(item.substr(c2 + 1));
    const double start = to_double(key, a);
    const double stop = to_double(key, b);
    const double step = to_double(key, s);
    if (!(step > 0.0) || stop < start) {
      bad(key, "range '" + item + "' needs start <= stop and step > 0");
    }
    const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    const std::size_t prec = std::max(decimals(a), decimals(s));
    for (long long i = 0; i <= n; ++i) {
      out.push_back(fmt::format("{:.{}f}", start + static_cast<double>(i) * step,
                                prec));
    }
  }
  if (out.empty()) bad(key, "sweep list is empty");
  return out;
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& path,
                             const std::vector<Override>& overrides) {
  pt::ptree tree;
  std::filesystem::path base = std::filesystem::current_path();
  if (path) {
    if (!std::filesystem::exists(*path)) {
      throw Error(ErrorCode::InvalidConfig,
                  "--config: no such file " + path->string());
    }
    try {
      pt::read_ini(path->string(), tree);
    } catch (const pt::ini_parser_error& e) {
      throw Error(ErrorCode::InvalidConfig,
                  "--config " + path->string() + ": " + e.message() +
                      " (line " + std::to_string(e.line()) + ")");
    }
    base = std::filesystem::absolute(*path).parent_path();
  }
  Keys keys(tree);
  for (const Override& o : overrides) keys.set(o.key, o.value);

  const auto resolve = [&base](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  const auto opt = [&keys](const std::string& key) { return keys.find(key); };

  ExperimentConfig cfg;
  const bool sweeping =
      opt("sweep.variable").has_value() || opt("sweep.values").has_value();
  const std::string sweep_var =
      sweeping ? keys.require("sweep.variable") : std::string();
  // A swept key need not be present in the base config.
  const auto swept = [&](const char* var) { return sweeping && sweep_var == var; };

  noc::NocConfig& n = cfg.noc;
  if (swept("mesh_size")) {
    n.width = n.height = 1;  // placeholder until each point sets the size
    if (auto v = opt("noc.width")) n.width = to_unsigned("noc.width", *v);
    if (auto v = opt("noc.height")) n.height = to_unsigned("noc.height", *v);
  } else {
    n.width = to_unsigned("noc.width", keys.require("noc.width"));
    n.height = to_unsigned("noc.height", keys.require("noc.height"));
  }
  if (auto v = opt("noc.num_vcs")) n.num_vcs = to_unsigned("noc.num_vcs", *v);
  if (auto v = opt("noc.buffer_depth")) {
    n.buffer_depth = to_unsigned("noc.buffer_depth", *v);
  }
  if (auto v = opt("noc.router_delay")) {
    n.router_delay = to_unsigned("noc.router_delay", *v);
  }
  if (auto v = opt("noc.packet_len")) {
    n.packet_len = to_unsigned("noc.packet_len", *v);
  }
  if (auto v = opt("noc.seed")) n.seed = to_integer<std::uint64_t>("noc.seed", *v);
  noc::validate(n);  // messages already carry the noc.* key

  TrafficConfig& t = cfg.traffic;
  const std::string kind = keys.require("traffic.kind");
  if (kind == "uniform") {
    t.kind = TrafficKind::Uniform;
  } else if (kind == "trace") {
    t.kind = TrafficKind::Trace;
  } else if (kind == "cnn") {
    t.kind = TrafficKind::Cnn;
  } else {
    bad("traffic.kind", "expected uniform, trace or cnn, got '" + kind + "'");
  }

  switch (t.kind) {
    case TrafficKind::Uniform:
      if (!swept("flit_rate")) {
        t.flit_rate = to_double("traffic.flit_rate",
                                keys.require("traffic.flit_rate"));
      }
      t.duration = to_integer<Cycle>("traffic.duration",
                                     keys.require("traffic.duration"));
      break;
    case TrafficKind::Trace:
      t.trace = resolve(keys.require("traffic.trace"));
      break;
    case TrafficKind::Cnn: {
      if (!swept("sparsity")) {
        t.sparsity = to_double("traffic.sparsity",
                               keys.require("traffic.sparsity"));
      }
      t.duration = to_integer<Cycle>("traffic.duration",
                                     keys.require("traffic.duration"));
      t.mapping = opt("traffic.mapping").value_or("snake");
      if (t.mapping != "snake" && t.mapping != "locality") {
        t.mapping = resolve(t.mapping).string();
      } else {
        std::istringstream list(keys.require("traffic.layers"));
        std::string item;
        while (std::getline(list, item, ',')) {
          item = trim(item);
          if (!item.empty()) {
            t.layers.push_back(to_integer<std::uint64_t>("traffic.layers", item));
          }
        }
        if (t.layers.empty()) bad("traffic.layers", "needs at least one layer");
        t.neurons_per_core = to_integer<std::uint64_t>(
            "traffic.neurons_per_core", keys.require("traffic.neurons_per_core"));
        if (t.neurons_per_core == 0) bad("traffic.neurons_per_core", "must be >= 1");
      }
      if (auto v = opt("traffic.framerate")) {
        t.framerate = to_double("traffic.framerate", *v);
      }
      if (auto v = opt("traffic.frequency")) {
        t.frequency = to_double("traffic.frequency", *v);
        if (!(t.frequency > 0.0)) bad("traffic.frequency", "must be > 0");
      }
      break;
    }
  }
  if (t.flit_rate < 0.0 || t.flit_rate > 1.0) {
    bad("traffic.flit_rate", "must lie in [0, 1]");
  }
  if (t.sparsity < 0.0 || t.sparsity > 1.0) {
    bad("traffic.sparsity", "must lie in [0, 1]");
  }

  if (auto v = opt("run.max_cycle")) {
    cfg.run.max_cycle = to_integer<Cycle>("run.max_cycle", *v);
  }
  if (auto v = opt("run.link")) {
    if (*v == "inprocess") {
      cfg.run.link = host::LinkKind::InProcess;
    } else if (*v == "threaded") {
      cfg.run.link = host::LinkKind::Threaded;
    } else {
      bad("run.link", "expected inprocess or threaded, got '" + *v + "'");
    }
  }

  if (auto v = opt("output.dir")) cfg.output.dir = *v;  // relative to cwd
  if (auto v = opt("output.timing")) {
    cfg.output.timing = to_bool("output.timing", *v);
  }
  if (auto v = opt("output.frame_log")) {
    cfg.output.frame_log = to_bool("output.frame_log", *v);
  }

  if (sweeping) {
    SweepConfig s;
    if (sweep_var == "sparsity") {
      s.variable = SweepVariable::Sparsity;
      if (t.kind != TrafficKind::Cnn) {
        bad("sweep.variable", "sparsity sweeps need traffic.kind = cnn");
      }
    } else if (sweep_var == "flit_rate") {
      s.variable = SweepVariable::FlitRate;
      if (t.kind != TrafficKind::Uniform) {
        bad("sweep.variable", "flit_rate sweeps need traffic.kind = uniform");
      }
    } else if (sweep_var == "mesh_size") {
      s.variable = SweepVariable::MeshSize;
      if (t.kind == TrafficKind::Trace) {
        bad("sweep.variable", "mesh_size sweeps cannot replay a fixed trace");
      }
    } else {
      bad("sweep.variable", "expected sparsity, flit_rate or mesh_size, got '" +
                                sweep_var + "'");
    }
    s.values = expand_values("sweep.values", keys.require("sweep.values"));
    for (const std::string& v : s.values) {
      const double x = to_double("sweep.values", v);
      if (s.variable == SweepVariable::MeshSize) {
        to_unsigned("sweep.values", v);
      } else if (x < 0.0 || x > 1.0) {
        bad("sweep.values", "value " + v + " outside [0, 1]");
      }
    }
    if (auto v = opt("sweep.jobs")) {
      s.jobs = std::max(1u, to_unsigned("sweep.jobs", *v));
    }
    cfg.sweep = std::move(s);
  }
  return cfg;
}

}  // namespace emunoc::cli
