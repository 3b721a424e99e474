// SPDX-License-Identifier: Apache-2.0

#include "emunoc/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace emunoc::metrics {

namespace {

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json opt(const std::optional<Cycle>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename T>
std::string cell(const std::optional<T>& v) {
  return v ? std::to_string(*v) : std::string();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace

double nearest_rank(const std::vector<double>& sorted, double p) {
  const auto n = sorted.size();
  const auto rank = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::floor(p * static_cast<double>(n))) + 1);
  return sorted[rank - 1];
}

Summary summarize(const std::vector<PacketRecord>& records, Cycle sim_cycles,
                  std::optional<double> wall_seconds, unsigned nodes) {
  Summary s;
  s.packets = records.size();
  s.cycles = sim_cycles;
  s.wall_seconds = wall_seconds;
  if (wall_seconds && *wall_seconds > 0.0) {
    s.emu_hz = static_cast<double>(sim_cycles) / *wall_seconds;
  }

  std::vector<double> latencies;
  double head_sum = 0.0;
  std::uint64_t head_count = 0;
  for (const PacketRecord& r : records) {
    if (auto l = r.latency()) {
      latencies.push_back(static_cast<double>(*l));
      s.flits_delivered += r.len;
    }
    if (auto h = r.head_latency()) {
      head_sum += static_cast<double>(*h);
      ++head_count;
    }
  }
  s.delivered = latencies.size();
  if (sim_cycles > 0 && nodes > 0) {
    s.accepted_flit_rate = static_cast<double>(s.flits_delivered) /
                           (static_cast<double>(sim_cycles) * nodes);
  }
  if (!latencies.empty()) {
    std::sort(latencies.begin(), latencies.end());
    double sum = 0.0;
    for (double l : latencies) sum += l;
    s.min_latency = latencies.front();
    s.max_latency = latencies.back();
    s.mean_latency = sum / static_cast<double>(latencies.size());
    s.p50_latency = nearest_rank(latencies, 0.50);
    s.p99_latency = nearest_rank(latencies, 0.99);
  }
  if (head_count > 0) s.mean_head_latency = head_sum / head_count;
  return s;
}

std::string summary_json(const Summary& s,
                         const std::vector<PacketRecord>& records) {
  nlohmann::ordered_json j;
  j["packets"] = s.packets;
  j["delivered"] = s.delivered;
  j["flits_delivered"] = s.flits_delivered;
  j["cycles"] = s.cycles;
  j["wall_seconds"] = opt(s.wall_seconds);
  j["emu_hz"] = opt(s.emu_hz);
  j["accepted_flit_rate"] = s.accepted_flit_rate;
  j["min_latency"] = opt(s.min_latency);
  j["max_latency"] = opt(s.max_latency);
  j["mean_latency"] = opt(s.mean_latency);
  j["p50_latency"] = opt(s.p50_latency);
  j["p99_latency"] = opt(s.p99_latency);
  j["mean_head_latency"] = opt(s.mean_head_latency);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const PacketRecord& r : records) {
    nlohmann::ordered_json row;
    row["id"] = r.id;
    row["src"] = r.src;
    row["dst"] = r.dst;
    row["len"] = r.len;
    row["icyc"] = r.icyc;
    row["injected"] = opt(r.injected);
    row["arrived"] = opt(r.arrived);
    row["latency"] = opt(r.latency());
    row["head_latency"] = opt(r.head_latency());
    rows.push_back(std::move(row));
  }
  j["per_packet"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string packets_csv(const std::vector<PacketRecord>& records) {
  std::ostringstream os;
  os << "id,src,dst,len,icyc,injected,arrived,latency,head_latency\n";
  for (const PacketRecord& r : records) {
    os << r.id << ',' << r.src << ',' << r.dst << ',' << r.len << ','
       << r.icyc << ',' << cell(r.injected) << ',' << cell(r.arrived) << ','
       << cell(r.latency()) << ',' << cell(r.head_latency()) << '\n';
  }
  return os.str();
}

void write_report(const Summary& summary,
                  const std::vector<PacketRecord>& records,
                  const std::filesystem::path& json_path,
                  const std::filesystem::path& csv_path) {
  write_file(json_path, summary_json(summary, records));
  write_file(csv_path, packets_csv(records));
}

}  // namespace emunoc::metrics
