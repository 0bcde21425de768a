#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "desired/sim/engine.hpp"
#include "desired/sim/packet.hpp"

namespace desired::sim {

using PortIndex = std::uint16_t;

struct Link {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  std::int64_t capacity_bps = 0;
  Time propagation = 0;
  std::uint32_t mtu = 1500;

  /// ceil(bits / capacity) in microseconds.
  Time serialization_delay(std::uint32_t bytes) const;
};

/// Throws std::invalid_argument unless capacity > 0 and propagation >= 0.
void validate(const Link& link);

struct QueuedPacket {
  Packet packet;
  Time ingress_ts = 0;
  Time enq_ts = 0;
  std::uint32_t enq_qdepth = 0;
  PortIndex ingress_port = 0;
};

struct PortStats {
  std::array<std::uint64_t, kPacketKindCount> tx_packets{};
  std::array<std::uint64_t, kPacketKindCount> tx_bytes{};
  std::uint64_t tail_drops = 0;
  std::uint64_t max_depth_bytes = 0;

  std::uint64_t total_tx_bytes() const;
};

class Node;

// Output port: FIFO byte-capped queue feeding one unidirectional link.
class Port {
 public:
  Port(Simulator& sim, Node& owner, PortIndex index, Link link, std::uint64_t byte_capacity);

  void connect(Node& peer, PortIndex peer_port);

  /// Returns false when the packet is tail-dropped.
  bool enqueue(Packet pkt, Time ingress_ts, PortIndex ingress_port = 0);

  PortIndex index() const noexcept { return index_; }
  const Link& link() const noexcept { return link_; }
  Node* peer() const noexcept { return peer_; }
  std::size_t depth_packets() const noexcept { return queue_.size(); }
  std::uint64_t depth_bytes() const noexcept { return depth_bytes_; }
  const PortStats& stats() const noexcept { return stats_; }

 private:
  void try_transmit();

  Simulator& sim_;
  Node& owner_;
  PortIndex index_;
  Link link_;
  std::uint64_t byte_capacity_;
  Node* peer_ = nullptr;
  PortIndex peer_port_ = 0;
  std::deque<QueuedPacket> queue_;
  std::uint64_t depth_bytes_ = 0;
  bool busy_ = false;
  PortStats stats_;
};

class Node {
 public:
  Node(Simulator& sim, NodeId id, std::string name);
  virtual ~Node() = default;
  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  NodeId id() const noexcept { return id_; }
  const std::string& name() const noexcept { return name_; }
  Simulator& sim() noexcept { return sim_; }

  /// Called when a packet finishes propagation on a link into this node.
  virtual void receive(Packet pkt, PortIndex in_port) = 0;

  /// Egress hook, called as \p qp leaves the queue of \p port, before
  /// serialization. depth_after is the queue length once qp is removed.
  virtual void on_dequeue(PortIndex port, QueuedPacket& qp, std::uint32_t depth_after);

  PortIndex add_port(Link link, std::uint64_t byte_capacity);
  Port& port(PortIndex i) { return *ports_.at(i); }
  const Port& port(PortIndex i) const { return *ports_.at(i); }
  std::size_t port_count() const noexcept { return ports_.size(); }

  void set_route(NodeId dst, PortIndex port) { routes_[dst] = port; }
  /// Output port toward \p dst; throws std::out_of_range if unroutable.
  PortIndex route(NodeId dst) const;

  /// Packets sent by this node get uids unique within the simulation.
  std::uint64_t next_packet_uid();

 private:
  Simulator& sim_;
  NodeId id_;
  std::string name_;
  std::vector<std::unique_ptr<Port>> ports_;
  std::map<NodeId, PortIndex> routes_;
};

// Owns the nodes of a topology and wires bidirectional links between them.
class Network {
 public:
  explicit Network(Simulator& sim) : sim_(sim) {}

  template <typename T, typename... Args>
  T& add_node(Args&&... args) {
    const auto id = static_cast<NodeId>(nodes_.size());
    auto node = std::make_unique<T>(sim_, id, std::forward<Args>(args)...);
    T& ref = *node;
    nodes_.push_back(std::move(node));
    return ref;
  }

  /// Creates one port on each side. Returns (port on a, port on b).
  std::pair<PortIndex, PortIndex> connect(Node& a, Node& b, std::int64_t capacity_bps,
                                          Time propagation, std::uint32_t mtu,
                                          std::uint64_t byte_capacity_a,
                                          std::uint64_t byte_capacity_b);

  /// Fills every node's routing table with shortest-hop routes.
  void compute_routes();

  Node& node(NodeId id) { return *nodes_.at(id); }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Adjacency {
    NodeId peer;
    PortIndex port;
  };
  Simulator& sim_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::vector<std::vector<Adjacency>> adjacency_;
};

}  // namespace desired::sim
