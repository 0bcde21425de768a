#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "desired/sim/time.hpp"

namespace desired::sim {

enum class PacketKind : std::uint8_t {
  kData = 0,
  kAck = 1,
  kRequest = 2,
  kProbe = 3,
  kNotification = 4,
};
inline constexpr std::size_t kPacketKindCount = 5;

using FlowId = std::uint32_t;

struct Packet {
  std::uint64_t uid = 0;
  PacketKind kind = PacketKind::kData;
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  FlowId flow = 0;
  std::uint32_t size_bytes = 0;

  // ECN: ect on data of ECN-capable flows, ce set by a marking AQM,
  // ece/cwr carried on ACK and data respectively.
  bool ect = false;
  bool ce = false;
  bool ece = false;
  bool cwr = false;

  // Data: segment number. Request: request index. Probe: probe sequence.
  std::int64_t seq = 0;
  // Ack: cumulative next expected segment. Request: segment count.
  std::int64_t ack = 0;
  Time sent_at = 0;

  // Probe only: concatenated 32-byte INT records in hop order.
  std::vector<std::uint8_t> telemetry;
};

}  // namespace desired::sim
