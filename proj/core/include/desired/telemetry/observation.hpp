#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "desired/telemetry/probe.hpp"

namespace desired::telemetry {

inline constexpr std::size_t kObservedSwitches = 2;
inline constexpr std::size_t kPerSwitchFeatures = 8;
inline constexpr std::size_t kFeatureCount = kObservedSwitches * kPerSwitchFeatures + 3;
static_assert(kFeatureCount == 19);

// Feature order. Per switch k the block starts at k * kPerSwitchFeatures.
enum PerSwitchFeature : std::size_t {
  kDeqDelayMean = 0,
  kDeqDelayMax,
  kDeqDelayLast,
  kDeqDepthMean,
  kDeqDepthMax,
  kEnqDepthMean,
  kProbeCount,
  kHopLatencyMean,
};
inline constexpr std::size_t kPathLatencyMean = 16;
inline constexpr std::size_t kProbeLossFraction = 17;
inline constexpr std::size_t kTargetDelay = 18;

/// Column name of feature \p i, e.g. "s0_deq_delay_mean".
std::string feature_name(std::size_t i);

/// Fixed normalization constants; no running statistics.
struct FeatureScales {
  double delay_us = 100000.0;   // 100 ms
  double depth_packets = 1000.0;
  double expected_probes = 400.0;  // window length / probe period
};

struct SwitchAggregate {
  double deq_delay_mean = 0, deq_delay_max = 0, deq_delay_last = 0;
  double deq_depth_mean = 0, deq_depth_max = 0, enq_depth_mean = 0;
  double probe_count = 0;
  double hop_latency_mean = 0;
};

// Un-normalized window statistics in microseconds and packets.
struct WindowAggregate {
  std::array<SwitchAggregate, kObservedSwitches> switches{};
  double path_latency_mean = 0;
  double probe_loss_fraction = 0;
  std::size_t record_count = 0;
};

struct ObservationFrame {
  Time window_start = 0;
  Time window_end = 0;
  std::array<double, kFeatureCount> features{};
  std::size_t record_count = 0;
};

struct WindowInput {
  Time window_start = 0;
  Time window_end = 0;
  std::span<const CollectedProbe> probes;  // arrival order
  std::int64_t probes_sent = 0;
  Time target_delay = 0;
  std::array<std::uint32_t, kObservedSwitches> switch_ids{1, 2};
};

WindowAggregate aggregate_window(const WindowInput& in);

/// Scales an aggregate into the 19-element agent input.
ObservationFrame make_frame(const WindowInput& in, const WindowAggregate& agg,
                            const FeatureScales& scales);

inline ObservationFrame aggregate_observation(const WindowInput& in, const FeatureScales& scales) {
  return make_frame(in, aggregate_window(in), scales);
}

}  // namespace desired::telemetry
