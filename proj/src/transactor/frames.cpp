// SPDX-License-Identifier: Apache-2.0

#include "emunoc/transactor/frames.hpp"

#include <string>

namespace emunoc::transactor {

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename T>
T get(std::span<const std::uint8_t>& in) {
  if (in.size() < sizeof(T)) {
    throw Error(ErrorCode::MalformedFrame, "truncated frame");
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<T>(in[i]) << (8 * i));
  }
  in = in.subspan(sizeof(T));
  return value;
}

void expect_pad(std::span<const std::uint8_t>& in) {
  if (get<std::uint16_t>(in) != 0) {
    throw Error(ErrorCode::MalformedFrame, "nonzero pad field");
  }
}

std::uint32_t checked_count(std::size_t n) {
  if (n > 0xFFFFFFFFu) {
    throw Error(ErrorCode::MalformedFrame, "too many records for one frame");
  }
  return static_cast<std::uint32_t>(n);
}

}  // namespace

void encode(const InjectionFrame& frame, std::vector<std::uint8_t>& out) {
  put<std::uint64_t>(out, frame.injection_cycle);
  put<std::uint32_t>(out, checked_count(frame.descriptors.size()));
  for (const PacketDescriptor& d : frame.descriptors) {
    put<std::uint32_t>(out, d.id);
    put<std::uint16_t>(out, d.src);
    put<std::uint16_t>(out, d.dst);
    put<std::uint16_t>(out, d.len);
    put<std::uint16_t>(out, 0);
  }
}

void encode(const EjectionFrame& frame, std::vector<std::uint8_t>& out) {
  put<std::uint64_t>(out, frame.halt_cycle);
  put<std::uint32_t>(out, checked_count(frame.arrivals.size()));
  for (const Arrival& a : frame.arrivals) {
    put<std::uint32_t>(out, a.id);
    put<std::uint16_t>(out, a.src);
    put<std::uint16_t>(out, a.dst);
    put<std::uint16_t>(out, a.len);
    put<std::uint16_t>(out, 0);
    put<std::uint64_t>(out, a.arrival_cycle);
  }
}

InjectionFrame decode_injection(std::span<const std::uint8_t>& bytes) {
  InjectionFrame frame;
  frame.injection_cycle = get<std::uint64_t>(bytes);
  const std::uint32_t count = get<std::uint32_t>(bytes);
  if (bytes.size() < std::size_t{count} * kDescriptorBytes) {
    throw Error(ErrorCode::MalformedFrame,
                "frame announces " + std::to_string(count) +
                    " descriptors but is truncated");
  }
  frame.descriptors.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    PacketDescriptor d;
    d.id = get<std::uint32_t>(bytes);
    d.src = get<std::uint16_t>(bytes);
    d.dst = get<std::uint16_t>(bytes);
    d.len = get<std::uint16_t>(bytes);
    expect_pad(bytes);
    frame.descriptors.push_back(d);
  }
  return frame;
}

EjectionFrame decode_ejection(std::span<const std::uint8_t>& bytes) {
  EjectionFrame frame;
  frame.halt_cycle = get<std::uint64_t>(bytes);
  const std::uint32_t count = get<std::uint32_t>(bytes);
  if (bytes.size() < std::size_t{count} * kArrivalBytes) {
    throw Error(ErrorCode::MalformedFrame,
                "frame announces " + std::to_string(count) +
                    " arrivals but is truncated");
  }
  frame.arrivals.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Arrival a;
    a.id = get<std::uint32_t>(bytes);
    a.src = get<std::uint16_t>(bytes);
    a.dst = get<std::uint16_t>(bytes);
    a.len = get<std::uint16_t>(bytes);
    expect_pad(bytes);
    a.arrival_cycle = get<std::uint64_t>(bytes);
    frame.arrivals.push_back(a);
  }
  return frame;
}

void FrameLog::write(std::ostream& os) const {
  os.write(reinterpret_cast<const char*>(bytes_.data()),
           static_cast<std::streamsize>(bytes_.size()));
}

}  // namespace emunoc::transactor
