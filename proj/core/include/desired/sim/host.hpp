#pragma once

#include <array>
#include <functional>
#include <map>

#include "desired/sim/network.hpp"

namespace desired::sim {

class PacketSink {
 public:
  virtual ~PacketSink() = default;
  virtual void send(Packet pkt) = 0;
  virtual NodeId address() const = 0;
};

// End system with a single access port. Data and ACK packets are delivered to
// the handler bound to their flow; everything else goes to a per-kind handler.
class Host : public Node, public PacketSink {
 public:
  using Handler = std::function<void(const Packet&)>;

  Host(Simulator& sim, NodeId id, std::string name);

  void receive(Packet pkt, PortIndex in_port) override;

  void send(Packet pkt) override;
  NodeId address() const override { return id(); }

  void bind_flow(FlowId flow, Handler handler) { flow_handlers_[flow] = std::move(handler); }
  void unbind_flow(FlowId flow) { flow_handlers_.erase(flow); }
  void set_kind_handler(PacketKind kind, Handler handler) {
    kind_handlers_[static_cast<std::size_t>(kind)] = std::move(handler);
  }

  /// Packets for flows that are no longer bound (closed connections).
  std::uint64_t orphaned() const noexcept { return orphaned_; }
  std::uint64_t send_drops() const noexcept { return send_drops_; }

 private:
  std::map<FlowId, Handler> flow_handlers_;
  std::array<Handler, kPacketKindCount> kind_handlers_{};
  std::uint64_t orphaned_ = 0;
  std::uint64_t send_drops_ = 0;
};

}  // namespace desired::sim
