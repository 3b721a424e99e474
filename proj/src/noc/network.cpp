// SPDX-License-Identifier: Apache-2.0

#include "emunoc/noc/network.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace emunoc::noc {

namespace {

[[noreturn]] void contract(const std::string& what) {
  throw Error(ErrorCode::ContractViolation, what);
}

}  // namespace

// ---------------------------------------------------------------------------
// EjectionNi

EjectionNi::EjectionNi(unsigned num_vcs, unsigned depth)
    : depth_(depth), vcs_(num_vcs) {}

bool EjectionNi::receive(unsigned vc, const Flit& flit, Cycle cycle) {
  VcFifo& f = vcs_[vc];
  if (f.occupancy >= depth_) {
    contract("ejection NI overflow on vc " + std::to_string(vc));
  }
  if (f.received == 0) {
    if (flit.kind != FlitKind::Head) {
      contract("ejection NI: packet " + std::to_string(flit.packet_id) +
               " started without a head flit");
    }
    f.header = flit.header();
    f.head_at = cycle;
  } else if (f.complete || flit.kind == FlitKind::Head ||
             flit.packet_id != f.header.id) {
    contract("ejection NI: flit of packet " + std::to_string(flit.packet_id) +
             " interleaved into packet " + std::to_string(f.header.id));
  }
  ++f.occupancy;
  ++f.received;
  const bool reached_len = f.received == f.header.len;
  if (reached_len != flit.last) {
    contract("ejection NI: flit count disagrees with tail marker for packet " +
             std::to_string(f.header.id));
  }
  if (reached_len) {
    f.complete = true;
    f.completed_at = cycle;
  }
  return reached_len;
}

PacketHeader EjectionNi::drain(unsigned vc) {
  VcFifo& f = vcs_[vc];
  if (!f.complete) {
    contract("drain of ejection NI vc " + std::to_string(vc) +
             " without a complete packet");
  }
  PacketHeader h = f.header;
  f = VcFifo{};
  return h;
}

// ---------------------------------------------------------------------------
// Network

Network::Network(const NocConfig& config) : config_(config) {
  validate(config_);
  const unsigned n = config_.node_count();
  const unsigned v = config_.num_vcs;
  routers_.resize(n);
  local_credits_.assign(n, std::vector<unsigned>(v, config_.buffer_depth));
  ejection_.assign(n, EjectionNi(v, config_.ejection_fifo_depth()));
  for (NodeId node = 0; node < n; ++node) {
    Router& r = routers_[node];
    r.inputs.resize(kNumPorts * v);
    for (Port p : kAllPorts) {
      OutputPort& out = r.outputs[index(p)];
      out.owner.assign(v, -1);
      if (p == Port::Local) {
        out.connected = true;
        out.credits.assign(v, config_.ejection_fifo_depth());
      } else if (auto peer = neighbour(node, p, config_)) {
        out.connected = true;
        out.peer = *peer;
        out.credits.assign(v, config_.buffer_depth);
      } else {
        out.credits.assign(v, 0);
      }
    }
  }
}

VcMask Network::inject_ready(NodeId node) const {
  VcMask mask = 0;
  for (unsigned vc = 0; vc < config_.num_vcs; ++vc) {
    if (local_credits_[node][vc] > 0) mask |= VcMask{1} << vc;
  }
  return mask;
}

bool Network::downstream_free(const Router& r, NodeId node, Port out,
                              unsigned vc) const {
  const OutputPort& o = r.outputs[index(out)];
  if (o.owner[vc] != -1) return false;
  return out != Port::Local || ejection_[node].vacant(vc);
}

void Network::evaluate(NodeId node, Cycle now, std::vector<Move>& moves) {
  Router& r = routers_[node];
  if (r.resident == 0) return;
  const unsigned v = config_.num_vcs;
  const unsigned slots = kNumPorts * v;
  const Cycle delay = config_.router_delay;

  auto ready = [&](const InputVc& in) {
    return !in.fifo.empty() && in.fifo.front().arrived + delay <= now;
  };

  // Route computation for heads that reached the front of an idle VC.
  for (InputVc& in : r.inputs) {
    if (in.state == VcState::Idle && ready(in)) {
      const Flit& head = in.fifo.front().flit;
      if (head.kind != FlitKind::Head) {
        contract("router " + std::to_string(node) +
                 ": body flit at the front of an idle VC");
      }
      in.out_port = route_xy(node, head.dst, config_);
      in.state = VcState::Routed;
    }
  }

  // VC allocation: per output, requesters served round-robin; each winner
  // takes the next free downstream VC in round-robin order.
  for (Port p : kAllPorts) {
    OutputPort& out = r.outputs[index(p)];
    if (!out.connected) continue;
    for (unsigned k = 0; k < slots; ++k) {
      const unsigned s = (out.va_pointer + k) % slots;
      InputVc& in = r.inputs[s];
      if (in.state != VcState::Routed || in.out_port != p || !ready(in)) {
        continue;
      }
      bool granted = false;
      for (unsigned j = 0; j < v; ++j) {
        const unsigned ovc = (out.vc_pointer + j) % v;
        if (downstream_free(r, node, p, ovc)) {
          out.owner[ovc] = static_cast<int>(s);
          out.vc_pointer = (ovc + 1) % v;
          in.out_vc = ovc;
          in.state = VcState::Active;
          granted = true;
          break;
        }
      }
      if (!granted) break;  // no free downstream VC left on this output
      out.va_pointer = (s + 1) % slots;
    }
  }

  // Switch allocation: one flit per output and one per input port per cycle,
  // round-robin over input VCs, pointer advancing only on a grant. Outputs
  // take turns going first.
  std::array<bool, kNumPorts> input_used{};
  for (unsigned i = 0; i < kNumPorts; ++i) {
    const Port p = kAllPorts[(now + i) % kNumPorts];
    OutputPort& out = r.outputs[index(p)];
    if (!out.connected) continue;
    for (unsigned k = 0; k < slots; ++k) {
      const unsigned s = (out.sa_pointer + k) % slots;
      const InputVc& in = r.inputs[s];
      if (in.state != VcState::Active || in.out_port != p || !ready(in) ||
          out.credits[in.out_vc] == 0 || input_used[s / v]) {
        continue;
      }
      input_used[s / v] = true;
      moves.push_back({node, s, p, in.out_vc});
      out.sa_pointer = (s + 1) % slots;
      break;
    }
  }
}

std::vector<Completion> Network::step(std::span<const Injection> injections) {
  const Cycle now = cycle_ + 1;
  const unsigned v = config_.num_vcs;

  // Phase 1: validate injections and collect every router decision against
  // the pre-cycle state.
  for (std::size_t i = 0; i < injections.size(); ++i) {
    const Injection& inj = injections[i];
    if (inj.node >= node_count() || inj.vc >= v) {
      contract("injection targets an invalid node or VC");
    }
    if (local_credits_[inj.node][inj.vc] == 0) {
      contract("injection without credit at node " + std::to_string(inj.node) +
               " vc " + std::to_string(inj.vc));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (injections[j].node == inj.node) {
        contract("two injections at node " + std::to_string(inj.node) +
                 " in one cycle");
      }
    }
    if (inj.flit.dst >= node_count() || inj.flit.src >= node_count()) {
      contract("injected flit addresses a node outside the mesh");
    }
  }
  moves_.clear();
  for (NodeId node = 0; node < node_count(); ++node) evaluate(node, now, moves_);

  // Phase 2: commit.
  std::vector<Completion> completions;
  for (const Move& m : moves_) {
    Router& r = routers_[m.router];
    InputVc& in = r.inputs[m.slot];
    const Flit flit = in.fifo.front().flit;
    in.fifo.pop_front();
    --r.resident;

    // Credit back to whoever feeds this input VC.
    const Port in_port = static_cast<Port>(m.slot / v);
    const unsigned in_vc = m.slot % v;
    if (in_port == Port::Local) {
      ++local_credits_[m.router][in_vc];
    } else {
      const NodeId up = *neighbour(m.router, in_port, config_);
      ++routers_[up].outputs[index(opposite(in_port))].credits[in_vc];
    }

    OutputPort& out = r.outputs[index(m.out)];
    --out.credits[m.out_vc];
    if (m.out == Port::Local) {
      if (observer_) observer_(m.router, m.out_vc, flit, now);
      if (ejection_[m.router].receive(m.out_vc, flit, now)) {
        const EjectionNi& ni = ejection_[m.router];
        completions.push_back({m.router, m.out_vc, ni.header(m.out_vc),
                               ni.completion_cycle(m.out_vc),
                               ni.head_cycle(m.out_vc)});
      }
    } else {
      Router& down = routers_[out.peer];
      down.inputs[slot(opposite(m.out), m.out_vc)].fifo.push_back({flit, now});
      ++down.resident;
    }
    if (flit.last) {
      out.owner[m.out_vc] = -1;
      in.state = VcState::Idle;
    }
  }

  for (const Injection& inj : injections) {
    Router& r = routers_[inj.node];
    r.inputs[slot(Port::Local, inj.vc)].fifo.push_back({inj.flit, now});
    ++r.resident;
    --local_credits_[inj.node][inj.vc];
    ++flits_injected_;
  }

  cycle_ = now;
  std::sort(completions.begin(), completions.end(),
            [](const Completion& a, const Completion& b) {
              return a.node != b.node ? a.node < b.node : a.vc < b.vc;
            });
  return completions;
}

bool Network::packet_complete(NodeId node, unsigned vc) const {
  return ejection_[node].packet_complete(vc);
}

PacketHeader Network::drain_ejection(NodeId node, unsigned vc) {
  if (node >= node_count() || vc >= config_.num_vcs) {
    contract("drain of an invalid node or VC");
  }
  const unsigned flits = ejection_[node].occupancy(vc);
  PacketHeader h = ejection_[node].drain(vc);
  routers_[node].outputs[index(Port::Local)].credits[vc] += flits;
  flits_ejected_ += flits;
  return h;
}

std::uint64_t Network::resident_flits() const {
  std::uint64_t total = 0;
  for (NodeId node = 0; node < node_count(); ++node) {
    total += routers_[node].resident;
    for (unsigned vc = 0; vc < config_.num_vcs; ++vc) {
      total += ejection_[node].occupancy(vc);
    }
  }
  return total;
}

unsigned Network::credits(NodeId node, Port out, unsigned vc) const {
  return routers_[node].outputs[index(out)].credits[vc];
}

unsigned Network::local_credits(NodeId node, unsigned vc) const {
  return local_credits_[node][vc];
}

unsigned Network::occupancy(NodeId node, Port in, unsigned vc) const {
  return static_cast<unsigned>(routers_[node].inputs[slot(in, vc)].fifo.size());
}

std::optional<std::string> Network::audit() const {
  const unsigned v = config_.num_vcs;
  const unsigned depth = config_.buffer_depth;
  std::uint64_t resident = 0;
  for (NodeId node = 0; node < node_count(); ++node) {
    const Router& r = routers_[node];
    unsigned counted = 0;
    for (Port p : kAllPorts) {
      for (unsigned vc = 0; vc < v; ++vc) {
        const unsigned occ = occupancy(node, p, vc);
        counted += occ;
        std::ostringstream where;
        where << "node " << node << " port " << to_string(p) << " vc " << vc;
        if (occ > depth) return "buffer overflow at " + where.str();
        // Credit conservation on the link feeding this input VC.
        unsigned upstream = 0;
        if (p == Port::Local) {
          upstream = local_credits_[node][vc];
        } else if (auto up = neighbour(node, p, config_)) {
          upstream = routers_[*up].outputs[index(opposite(p))].credits[vc];
        } else {
          if (occ != 0) return "flit on an unconnected port at " + where.str();
          continue;
        }
        if (upstream + occ != depth) {
          return "credit conservation broken at " + where.str();
        }
      }
    }
    if (counted != r.resident) {
      return "resident count mismatch at node " + std::to_string(node);
    }
    resident += counted;
    for (unsigned vc = 0; vc < v; ++vc) {
      const unsigned occ = ejection_[node].occupancy(vc);
      resident += occ;
      if (r.outputs[index(Port::Local)].credits[vc] + occ !=
          ejection_[node].depth()) {
        return "ejection credit conservation broken at node " +
               std::to_string(node) + " vc " + std::to_string(vc);
      }
    }
  }
  if (flits_injected_ - flits_ejected_ != resident) {
    return "flit conservation broken: injected " +
           std::to_string(flits_injected_) + " ejected " +
           std::to_string(flits_ejected_) + " resident " +
           std::to_string(resident);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// InjectionEndpoint

InjectionEndpoint::InjectionEndpoint(NodeId node, unsigned num_vcs)
    : node_(node), num_vcs_(num_vcs) {}

std::optional<Injection> InjectionEndpoint::next(VcMask ready) {
  if (queue_.empty()) return std::nullopt;
  const PacketHeader& packet = queue_.front();
  if (sent_ == 0) {
    // New packet: the NI assigns it a VC round-robin among those with credit.
    bool found = false;
    for (unsigned k = 0; k < num_vcs_; ++k) {
      const unsigned vc = (rr_ + k) % num_vcs_;
      if (ready & (VcMask{1} << vc)) {
        vc_ = vc;
        rr_ = (vc + 1) % num_vcs_;
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  } else if (!(ready & (VcMask{1} << vc_))) {
    return std::nullopt;
  }
  Injection inj{node_, vc_, Flit::make(packet, sent_)};
  if (++sent_ == packet.len) {
    queue_.pop_front();
    sent_ = 0;
  }
  return inj;
}

}  // namespace emunoc::noc
