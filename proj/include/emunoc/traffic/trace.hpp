// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "emunoc/traffic/event.hpp"

namespace emunoc::traffic {

/// A dependency-annotated packet trace:
///
///   emunoc-trace v1 nodes=<N> packets=<P>
///   <id> <icyc> <src> <dst> <len> [dep_id ...]
///
/// Blank lines and text after '#' are ignored. Records must appear in
/// topological order: a dependency names an id declared on an earlier line.
struct Trace {
  unsigned nodes = 0;
  EventList events;
};

/// Errors: ParseError (with the line number), DanglingDependency,
/// CyclicDependency.
Trace parse_trace(std::istream& in, const std::string& source = "<trace>");
Trace load_trace(const std::filesystem::path& path);

/// Canonical form: header line, then one record per line with single spaces.
void write_trace(const Trace& trace, std::ostream& out);
void save_trace(const Trace& trace, const std::filesystem::path& path);

}  // namespace emunoc::traffic
