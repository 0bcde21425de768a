#include "desired/sim/network.hpp"

#include <numeric>
#include <queue>

namespace desired::sim {

Time Link::serialization_delay(std::uint32_t bytes) const {
  const std::int64_t bits = static_cast<std::int64_t>(bytes) * 8;
  return (bits * kSecond + capacity_bps - 1) / capacity_bps;
}

void validate(const Link& link) {
  if (link.capacity_bps <= 0) throw std::invalid_argument("link capacity must be positive");
  if (link.propagation < 0) throw std::invalid_argument("link propagation must be non-negative");
  if (link.mtu == 0) throw std::invalid_argument("link mtu must be positive");
}

std::uint64_t PortStats::total_tx_bytes() const {
  return std::accumulate(tx_bytes.begin(), tx_bytes.end(), std::uint64_t{0});
}

Port::Port(Simulator& sim, Node& owner, PortIndex index, Link link, std::uint64_t byte_capacity)
    : sim_(sim), owner_(owner), index_(index), link_(link), byte_capacity_(byte_capacity) {
  validate(link_);
}

void Port::connect(Node& peer, PortIndex peer_port) {
  peer_ = &peer;
  peer_port_ = peer_port;
}

bool Port::enqueue(Packet pkt, Time ingress_ts, PortIndex ingress_port) {
  if (depth_bytes_ + pkt.size_bytes > byte_capacity_) {
    ++stats_.tail_drops;
    return false;
  }
  depth_bytes_ += pkt.size_bytes;
  if (depth_bytes_ > stats_.max_depth_bytes) stats_.max_depth_bytes = depth_bytes_;
  const auto depth = static_cast<std::uint32_t>(queue_.size());
  queue_.push_back(QueuedPacket{std::move(pkt), ingress_ts, sim_.now(), depth, ingress_port});
  try_transmit();
  return true;
}

void Port::try_transmit() {
  if (busy_ || queue_.empty()) return;
  QueuedPacket qp = std::move(queue_.front());
  queue_.pop_front();
  depth_bytes_ -= qp.packet.size_bytes;
  owner_.on_dequeue(index_, qp, static_cast<std::uint32_t>(queue_.size()));

  // on_dequeue may grow the packet (INT append); serialize the final size.
  Packet& pkt = qp.packet;
  const auto kind = static_cast<std::size_t>(pkt.kind);
  ++stats_.tx_packets[kind];
  stats_.tx_bytes[kind] += pkt.size_bytes;

  const Time ser = link_.serialization_delay(pkt.size_bytes);
  busy_ = true;
  sim_.schedule_in(ser, [this] {
    busy_ = false;
    try_transmit();
  });
  if (peer_ == nullptr) return;
  Node* peer = peer_;
  const PortIndex in_port = peer_port_;
  sim_.schedule(sim_.now() + ser + link_.propagation, peer->id(),
                [peer, in_port, p = std::move(pkt)]() mutable { peer->receive(std::move(p), in_port); });
}

Node::Node(Simulator& sim, NodeId id, std::string name) : sim_(sim), id_(id), name_(std::move(name)) {}

void Node::on_dequeue(PortIndex, QueuedPacket&, std::uint32_t) {}

PortIndex Node::add_port(Link link, std::uint64_t byte_capacity) {
  const auto idx = static_cast<PortIndex>(ports_.size());
  ports_.push_back(std::make_unique<Port>(sim_, *this, idx, link, byte_capacity));
  return idx;
}

PortIndex Node::route(NodeId dst) const {
  auto it = routes_.find(dst);
  if (it == routes_.end()) {
    throw std::out_of_range(name_ + ": no route to node " + std::to_string(dst));
  }
  return it->second;
}

std::uint64_t Node::next_packet_uid() { return sim_.allocate_uid(); }

std::pair<PortIndex, PortIndex> Network::connect(Node& a, Node& b, std::int64_t capacity_bps,
                                                 Time propagation, std::uint32_t mtu,
                                                 std::uint64_t byte_capacity_a,
                                                 std::uint64_t byte_capacity_b) {
  const PortIndex pa = a.add_port(Link{a.id(), b.id(), capacity_bps, propagation, mtu}, byte_capacity_a);
  const PortIndex pb = b.add_port(Link{b.id(), a.id(), capacity_bps, propagation, mtu}, byte_capacity_b);
  a.port(pa).connect(b, pb);
  b.port(pb).connect(a, pa);
  if (adjacency_.size() < nodes_.size()) adjacency_.resize(nodes_.size());
  adjacency_[a.id()].push_back({b.id(), pa});
  adjacency_[b.id()].push_back({a.id(), pb});
  return {pa, pb};
}

void Network::compute_routes() {
  adjacency_.resize(nodes_.size());
  // BFS from every destination; the first hop toward dst from node u is the
  // port on u leading to u's BFS parent.
  for (NodeId dst = 0; dst < nodes_.size(); ++dst) {
    std::vector<int> dist(nodes_.size(), -1);
    std::queue<NodeId> frontier;
    dist[dst] = 0;
    frontier.push(dst);
    while (!frontier.empty()) {
      const NodeId v = frontier.front();
      frontier.pop();
      for (NodeId u = 0; u < nodes_.size(); ++u) {
        if (dist[u] != -1) continue;
        for (const auto& adj : adjacency_[u]) {
          if (adj.peer == v) {
            dist[u] = dist[v] + 1;
            nodes_[u]->set_route(dst, adj.port);
            frontier.push(u);
            break;
          }
        }
      }
    }
  }
}

}  // namespace desired::sim
