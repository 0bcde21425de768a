#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "desired/sim/engine.hpp"
#include "desired/sim/host.hpp"
#include "desired/telemetry/int_codec.hpp"

namespace desired::telemetry {

using sim::Time;

inline constexpr std::uint32_t kProbeBaseBytes = 64;

struct CollectedProbe {
  std::int64_t seq = 0;
  Time sent_at = 0;
  Time received_at = 0;
  std::vector<IntRecord> records;
};

// Emits dedicated probe packets from a source host toward a destination at a
// fixed period. Switches on the path append their INT record.
class ProbeEmitter {
 public:
  ProbeEmitter(sim::Simulator& sim, sim::Host& source, sim::NodeId destination, Time period,
               std::uint32_t base_bytes = kProbeBaseBytes);

  /// First probe departs at \p first; the last at or before \p stop.
  void start(Time first, Time stop);

  std::int64_t sent() const noexcept { return static_cast<std::int64_t>(send_times_.size()); }
  /// Probes whose departure time lies in [from, to).
  std::int64_t sent_between(Time from, Time to) const;
  Time period() const noexcept { return period_; }

 private:
  void emit();

  sim::Simulator& sim_;
  sim::Host& source_;
  sim::NodeId destination_;
  Time period_;
  std::uint32_t base_bytes_;
  Time stop_ = 0;
  std::vector<Time> send_times_;
};

// Consumes probes at the destination host and decodes their INT stacks.
class ProbeCollector {
 public:
  using Observer = std::function<void(const CollectedProbe&)>;

  explicit ProbeCollector(sim::Host& sink);

  const std::vector<CollectedProbe>& probes() const noexcept { return probes_; }
  /// Probes received in [from, to), in arrival order.
  std::span<const CollectedProbe> received_between(Time from, Time to) const;

  void set_observer(Observer obs) { observer_ = std::move(obs); }

 private:
  std::vector<CollectedProbe> probes_;
  Observer observer_;
};

}  // namespace desired::telemetry
