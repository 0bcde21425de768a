#pragma once

#include <functional>
#include <span>
#include <string>

#include "desired/aqm/aqm.hpp"
#include "desired/sim/network.hpp"
#include "desired/telemetry/int_codec.hpp"

namespace desired::aqm {

struct SwitchConfig {
  std::uint32_t switch_id = 1;
  AqmMode mode = AqmMode::kFixed;
  Time target_delay = sim::milliseconds(20);
  double max_p = kDefaultMaxP;
  Time recirculation_latency = sim::microseconds(10);
  bool aqm_enabled = true;
  std::size_t hop_limit = telemetry::kDefaultHopLimit;
};

struct SwitchStats {
  std::uint64_t received = 0;
  std::uint64_t flag_drops = 0;
  std::uint64_t notifications = 0;
  std::uint64_t marks = 0;
  std::uint64_t tail_drops = 0;
  std::uint64_t int_appends = 0;
  std::uint64_t hop_limit_refusals = 0;
};

struct AqmTraceRow {
  Time time = 0;
  std::uint32_t switch_id = 0;
  PortIndex port = 0;
  Time avg_delay = 0;
  double probability = 0.0;
  Decision decision = Decision::kPass;
  std::uint64_t uid = 0;  // packet the decision was taken on
};

// Programmable-switch model. Ingress resolves the output port and applies the
// per-port drop flag; the traffic manager is a FIFO per port; egress updates
// the delay EWMA, decides, appends INT to probes, and recirculates a
// notification clone back to ingress when a future drop is due.
class Switch : public sim::Node {
 public:
  using TraceSink = std::function<void(const AqmTraceRow&)>;

  Switch(sim::Simulator& sim, sim::NodeId id, std::string name, SwitchConfig cfg);

  void receive(sim::Packet pkt, PortIndex in_port) override;
  void on_dequeue(PortIndex port, sim::QueuedPacket& qp, std::uint32_t depth_after) override;

  /// Schedules the clone that turns on the drop flag of \p port after the
  /// recirculation latency.
  void recirculate_notification(PortIndex port);

  std::uint32_t switch_id() const noexcept { return cfg_.switch_id; }
  const SwitchConfig& config() const noexcept { return cfg_; }
  const AqmState& aqm() noexcept { return state(); }
  const SwitchStats& stats() const noexcept { return stats_; }

  /// Used by apply_target_delay; validated there.
  void set_target(Time target) { set_target_delay(state(), target); }

  void set_trace(TraceSink sink) { trace_ = std::move(sink); }

 private:
  AqmState& state();

  SwitchConfig cfg_;
  AqmState aqm_;
  sim::RngStream& rng_;
  SwitchStats stats_;
  TraceSink trace_;
};

/// Sets target_delay on every switch in one step. All switches must be in
/// dynamic mode and the target within range; nothing changes otherwise.
void apply_target_delay(std::span<Switch* const> switches, Time new_target);

}  // namespace desired::aqm
