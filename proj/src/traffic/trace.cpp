// SPDX-License-Identifier: Apache-2.0

#include "emunoc/traffic/trace.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace emunoc::traffic {

namespace {

constexpr std::string_view kMagic = "emunoc-trace";
constexpr std::string_view kVersion = "v1";

[[noreturn]] void parse_error(const std::string& source, std::size_t line,
                              const std::string& what) {
  throw Error(ErrorCode::ParseError,
              source + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
bool to_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' ||
                               text[i] == '\r')) {
      ++i;
    }
    const std::size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t' &&
           text[i] != '\r') {
      ++i;
    }
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

unsigned header_field(std::string_view token, std::string_view key,
                      const std::string& source, std::size_t line) {
  unsigned value = 0;
  if (token.substr(0, key.size()) != key ||
      !to_number(token.substr(key.size()), value)) {
    parse_error(source, line,
                "expected " + std::string(key) + "<count> in trace header");
  }
  return value;
}

}  // namespace

Trace parse_trace(std::istream& in, const std::string& source) {
  Trace trace;
  bool have_header = false;
  std::size_t declared = 0;
  std::vector<std::size_t> line_of;  // source line per id, for later checks
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text(raw);
    text = text.substr(0, text.find('#'));
    const auto tokens = split(text);
    if (tokens.empty()) continue;

    if (!have_header) {
      if (tokens.size() != 4 || tokens[0] != kMagic || tokens[1] != kVersion) {
        parse_error(source, line,
                    "expected header 'emunoc-trace v1 nodes=<N> packets=<P>'");
      }
      trace.nodes = header_field(tokens[2], "nodes=", source, line);
      declared = header_field(tokens[3], "packets=", source, line);
      have_header = true;
      line_of.assign(declared, 0);
      trace.events.reserve(declared);
      continue;
    }

    if (tokens.size() < 5) {
      parse_error(source, line,
                  "record needs '<id> <icyc> <src> <dst> <len> [deps...]'");
    }
    TrafficEvent e;
    unsigned len = 0;
    if (!to_number(tokens[0], e.id)) parse_error(source, line, "bad id");
    if (!to_number(tokens[1], e.icyc)) parse_error(source, line, "bad icyc");
    if (!to_number(tokens[2], e.src)) parse_error(source, line, "bad src");
    if (!to_number(tokens[3], e.dst)) parse_error(source, line, "bad dst");
    if (!to_number(tokens[4], len) || len == 0 || len > 0xFFFF) {
      parse_error(source, line, "bad len");
    }
    e.len = static_cast<std::uint16_t>(len);
    if (e.src >= trace.nodes || e.dst >= trace.nodes) {
      parse_error(source, line, "address outside the " +
                                    std::to_string(trace.nodes) + "-node mesh");
    }
    if (e.id >= declared) {
      parse_error(source, line, "id " + std::to_string(e.id) +
                                    " outside [0, packets)");
    }
    if (line_of[e.id] != 0) {
      parse_error(source, line, "id " + std::to_string(e.id) +
                                    " already declared on line " +
                                    std::to_string(line_of[e.id]));
    }
    line_of[e.id] = line;
    for (std::size_t k = 5; k < tokens.size(); ++k) {
      PacketId dep = 0;
      if (!to_number(tokens[k], dep)) parse_error(source, line, "bad dep id");
      e.deps.push_back(dep);
    }
    trace.events.push_back(std::move(e));
  }
  if (!have_header) parse_error(source, line, "missing trace header");
  if (trace.events.size() != declared) {
    parse_error(source, line,
                "header declares " + std::to_string(declared) +
                    " packets, file holds " +
                    std::to_string(trace.events.size()));
  }

  // Dependencies: unknown ids are dangling; ids declared later either close
  // a cycle or break topological order.
  bool forward = false;
  std::size_t forward_line = 0;
  for (const TrafficEvent& e : trace.events) {
    for (PacketId dep : e.deps) {
      if (dep >= declared) {
        throw Error(ErrorCode::DanglingDependency,
                    source + ":" + std::to_string(line_of[e.id]) +
                        ": packet " + std::to_string(e.id) +
                        " depends on undeclared id " + std::to_string(dep));
      }
      if (line_of[dep] >= line_of[e.id] && !forward) {
        forward = true;
        forward_line = line_of[e.id];
      }
    }
  }
  if (forward) {
    validate_events(trace.events, trace.nodes, 0xFFFF);  // throws on a cycle
    parse_error(source, forward_line,
                "dependency on a later record; records must be in "
                "topological order");
  }
  return trace;
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open trace " + path.string());
  return parse_trace(in, path.string());
}

void write_trace(const Trace& trace, std::ostream& out) {
  out << kMagic << ' ' << kVersion << " nodes=" << trace.nodes
      << " packets=" << trace.events.size() << '\n';
  for (const TrafficEvent& e : trace.events) {
    out << e.id << ' ' << e.icyc << ' ' << e.src << ' ' << e.dst << ' '
        << e.len;
    for (PacketId d : e.deps) out << ' ' << d;
    out << '\n';
  }
}

void save_trace(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write trace " + path.string());
  write_trace(trace, out);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace emunoc::traffic
