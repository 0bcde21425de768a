#pragma once

#include <vector>

#include "desired/sim/network.hpp"

namespace testsupport {

// Node that records every packet it receives.
class SinkNode : public desired::sim::Node {
 public:
  struct Arrival {
    desired::sim::Time at;
    desired::sim::Packet packet;
    desired::sim::PortIndex port;
  };

  SinkNode(desired::sim::Simulator& sim, desired::sim::NodeId id, std::string name)
      : Node(sim, id, std::move(name)) {}

  void receive(desired::sim::Packet pkt, desired::sim::PortIndex in_port) override {
    arrivals.push_back({sim().now(), std::move(pkt), in_port});
  }

  std::vector<Arrival> arrivals;
};

}  // namespace testsupport
