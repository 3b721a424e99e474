// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emunoc/noc/config.hpp"
#include "emunoc/noc/flit.hpp"
#include "emunoc/noc/routing.hpp"

namespace emunoc::noc {

/// Bit v set means VC v.
using VcMask = std::uint64_t;

/// One flit offered by a node's injection NI in a given cycle.
struct Injection {
  NodeId node = 0;
  unsigned vc = 0;
  Flit flit;
};

/// A packet whose final flit entered an ejection-NI FIFO during a step.
struct Completion {
  NodeId node = 0;
  unsigned vc = 0;
  PacketHeader header;
  Cycle arrival_cycle = 0;
  Cycle head_arrival_cycle = 0;
};

/// Observer for every flit written into an ejection-NI FIFO.
using EjectionObserver =
    std::function<void(NodeId node, unsigned vc, const Flit& flit, Cycle cycle)>;

/// Per-VC receive side of a node: one FIFO per VC, deep enough for a whole
/// packet, plus the flit-count comparator that raises packet_complete.
class EjectionNi {
 public:
  EjectionNi(unsigned num_vcs, unsigned depth);

  bool packet_complete(unsigned vc) const { return vcs_[vc].complete; }
  unsigned occupancy(unsigned vc) const { return vcs_[vc].occupancy; }
  unsigned depth() const { return depth_; }
  /// Free for a new packet: nothing buffered and nothing pending drain.
  bool vacant(unsigned vc) const { return vcs_[vc].occupancy == 0; }

  /// Returns true when `flit` completed its packet.
  bool receive(unsigned vc, const Flit& flit, Cycle cycle);
  PacketHeader drain(unsigned vc);

  Cycle completion_cycle(unsigned vc) const { return vcs_[vc].completed_at; }
  Cycle head_cycle(unsigned vc) const { return vcs_[vc].head_at; }
  const PacketHeader& header(unsigned vc) const { return vcs_[vc].header; }

 private:
  struct VcFifo {
    unsigned occupancy = 0;
    unsigned received = 0;
    PacketHeader header;
    bool complete = false;
    Cycle head_at = 0;
    Cycle completed_at = 0;
  };
  unsigned depth_;
  std::vector<VcFifo> vcs_;
};

/// Cycle-accurate 2D mesh of input-buffered wormhole routers.
///
/// Each step is evaluated in two phases. Phase one makes every routing,
/// VC-allocation and switch-allocation decision from the state at the start
/// of the cycle; phase two moves the granted flits and returns credits. A
/// flit written into an input buffer in cycle t may cross the switch no
/// earlier than cycle t + router_delay, so an uncontended packet of `len`
/// flits over `hops` links completes (hops + 1) * router_delay + len - 1
/// cycles after its head was injected.
class Network {
 public:
  /// Throws Error{InvalidConfig}.
  explicit Network(const NocConfig& config);

  const NocConfig& config() const { return config_; }
  Cycle cycle() const { return cycle_; }
  unsigned node_count() const { return config_.node_count(); }

  /// VCs of the node's local input port that hold at least one credit.
  VcMask inject_ready(NodeId node) const;

  /// Advances one cycle. At most one injection per node; each must target a
  /// VC reported by inject_ready. Returns the packets completed this cycle in
  /// (node, vc) order.
  std::vector<Completion> step(std::span<const Injection> injections = {});

  bool packet_complete(NodeId node, unsigned vc) const;
  /// Removes a completed packet from the ejection NI and returns its header.
  /// Throws Error{ContractViolation} when nothing is complete on that VC.
  PacketHeader drain_ejection(NodeId node, unsigned vc);
  const EjectionNi& ejection_ni(NodeId node) const { return ejection_[node]; }

  void set_ejection_observer(EjectionObserver observer) {
    observer_ = std::move(observer);
  }

  // Instrumentation.
  std::uint64_t flits_injected() const { return flits_injected_; }
  std::uint64_t flits_ejected() const { return flits_ejected_; }
  std::uint64_t resident_flits() const;
  bool empty() const { return resident_flits() == 0; }
  unsigned credits(NodeId node, Port out, unsigned vc) const;
  unsigned local_credits(NodeId node, unsigned vc) const;
  unsigned occupancy(NodeId node, Port in, unsigned vc) const;
  /// Walks every buffer and credit counter. Returns a description of the
  /// first violated invariant, or nullopt.
  std::optional<std::string> audit() const;

 private:
  struct BufferedFlit {
    Flit flit;
    Cycle arrived;
  };

  enum class VcState : std::uint8_t { Idle, Routed, Active };

  struct InputVc {
    std::deque<BufferedFlit> fifo;
    VcState state = VcState::Idle;
    Port out_port = Port::Local;
    unsigned out_vc = 0;
  };

  struct OutputPort {
    bool connected = false;
    NodeId peer = 0;  // downstream router, unused for Local
    std::vector<unsigned> credits;
    std::vector<int> owner;  // input VC slot holding the downstream VC, or -1
    unsigned va_pointer = 0;
    unsigned vc_pointer = 0;
    unsigned sa_pointer = 0;
  };

  struct Router {
    std::vector<InputVc> inputs;  // kNumPorts * num_vcs, port-major
    std::array<OutputPort, kNumPorts> outputs;
    unsigned resident = 0;
  };

  struct Move {
    NodeId router;
    unsigned slot;
    Port out;
    unsigned out_vc;
  };

  unsigned slot(Port p, unsigned vc) const {
    return index(p) * config_.num_vcs + vc;
  }
  bool downstream_free(const Router& r, NodeId node, Port out,
                       unsigned vc) const;
  void evaluate(NodeId node, Cycle now, std::vector<Move>& moves);

  NocConfig config_;
  std::vector<Router> routers_;
  std::vector<std::vector<unsigned>> local_credits_;  // [node][vc]
  std::vector<EjectionNi> ejection_;
  Cycle cycle_ = 0;
  std::uint64_t flits_injected_ = 0;
  std::uint64_t flits_ejected_ = 0;
  EjectionObserver observer_;
  std::vector<Move> moves_;  // scratch
};

/// Source side of a node: the injection PE's packet FIFO and the NI that
/// serialises each packet into flits, one per cycle, on a VC chosen
/// round-robin among those with credit.
class InjectionEndpoint {
 public:
  InjectionEndpoint(NodeId node, unsigned num_vcs);

  void enqueue(const PacketHeader& packet) { queue_.push_back(packet); }

  /// Flit to inject this cycle given the VCs with credit, or nullopt. The
  /// endpoint assumes the returned flit is committed.
  std::optional<Injection> next(VcMask ready);

  bool idle() const { return queue_.empty(); }
  std::size_t backlog() const { return queue_.size(); }

 private:
  NodeId node_;
  unsigned num_vcs_;
  std::deque<PacketHeader> queue_;
  unsigned sent_ = 0;  // flits of queue_.front() already injected
  unsigned vc_ = 0;
  unsigned rr_ = 0;
};

}  // namespace emunoc::noc
