#include "desired/sim/host.hpp"

namespace desired::sim {

Host::Host(Simulator& sim, NodeId id, std::string name) : Node(sim, id, std::move(name)) {}

void Host::receive(Packet pkt, PortIndex) {
  if (pkt.kind == PacketKind::kData || pkt.kind == PacketKind::kAck) {
    auto it = flow_handlers_.find(pkt.flow);
    if (it == flow_handlers_.end()) {
      ++orphaned_;
      return;
    }
    it->second(pkt);
    return;
  }
  auto& handler = kind_handlers_[static_cast<std::size_t>(pkt.kind)];
  if (handler) {
    handler(pkt);
  } else {
    ++orphaned_;
  }
}

void Host::send(Packet pkt) {
  if (pkt.uid == 0) pkt.uid = next_packet_uid();
  if (pkt.src == kNoNode) pkt.src = id();
  const PortIndex out = port_count() == 1 ? PortIndex{0} : route(pkt.dst);
  if (!port(out).enqueue(std::move(pkt), sim().now())) ++send_drops_;
}

}  // namespace desired::sim
