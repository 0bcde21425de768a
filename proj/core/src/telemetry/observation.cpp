#include "desired/telemetry/observation.hpp"

#include <algorithm>
#include <cmath>

namespace desired::telemetry {

std::string feature_name(std::size_t i) {
  static constexpr const char* kPer[kPerSwitchFeatures] = {
      "deq_delay_mean", "deq_delay_max",  "deq_delay_last", "deq_depth_mean",
      "deq_depth_max",  "enq_depth_mean", "probe_count",    "hop_latency_mean"};
  if (i < kObservedSwitches * kPerSwitchFeatures) {
    return "s" + std::to_string(i / kPerSwitchFeatures) + "_" + kPer[i % kPerSwitchFeatures];
  }
  switch (i) {
    case kPathLatencyMean: return "path_latency_mean";
    case kProbeLossFraction: return "probe_loss_fraction";
    case kTargetDelay: return "target_delay";
    default: return "f" + std::to_string(i);
  }
}

WindowAggregate aggregate_window(const WindowInput& in) {
  WindowAggregate agg;
  struct Sums {
    double deq_delay = 0, deq_depth = 0, enq_depth = 0, hop_latency = 0;
    std::size_t n = 0;
  };
  std::array<Sums, kObservedSwitches> sums{};
  double path_latency_sum = 0;
  std::size_t path_samples = 0;

  for (const auto& probe : in.probes) {
    agg.record_count += probe.records.size();
    if (!probe.records.empty()) {
      const auto& first = probe.records.front();
      const auto& last = probe.records.back();
      path_latency_sum += static_cast<double>(last.egress_global_ts) -
                          static_cast<double>(first.ingress_global_ts);
      ++path_samples;
    }
    for (const auto& r : probe.records) {
      const auto it = std::find(in.switch_ids.begin(), in.switch_ids.end(), r.switch_id);
      if (it == in.switch_ids.end()) continue;
      const auto k = static_cast<std::size_t>(it - in.switch_ids.begin());
      auto& s = agg.switches[k];
      auto& acc = sums[k];
      const double deq = r.deq_timedelta;
      acc.deq_delay += deq;
      acc.deq_depth += r.deq_qdepth;
      acc.enq_depth += r.enq_qdepth;
      acc.hop_latency += static_cast<double>(r.egress_global_ts) -
                         static_cast<double>(r.ingress_global_ts);
      ++acc.n;
      s.deq_delay_max = std::max(s.deq_delay_max, deq);
      s.deq_depth_max = std::max(s.deq_depth_max, static_cast<double>(r.deq_qdepth));
      s.deq_delay_last = deq;
    }
  }
  for (std::size_t k = 0; k < kObservedSwitches; ++k) {
    const auto& acc = sums[k];
    auto& s = agg.switches[k];
    s.probe_count = static_cast<double>(acc.n);
    if (acc.n == 0) continue;
    const double n = static_cast<double>(acc.n);
    s.deq_delay_mean = acc.deq_delay / n;
    s.deq_depth_mean = acc.deq_depth / n;
    s.enq_depth_mean = acc.enq_depth / n;
    s.hop_latency_mean = acc.hop_latency / n;
  }
  if (path_samples > 0) agg.path_latency_mean = path_latency_sum / static_cast<double>(path_samples);
  if (in.probes_sent > 0) {
    const double got = static_cast<double>(in.probes.size());
    agg.probe_loss_fraction = std::max(0.0, 1.0 - got / static_cast<double>(in.probes_sent));
  }
  return agg;
}

ObservationFrame make_frame(const WindowInput& in, const WindowAggregate& agg,
                            const FeatureScales& scales) {
  ObservationFrame f;
  f.window_start = in.window_start;
  f.window_end = in.window_end;
  f.record_count = agg.record_count;
  for (std::size_t k = 0; k < kObservedSwitches; ++k) {
    const auto& s = agg.switches[k];
    double* out = f.features.data() + k * kPerSwitchFeatures;
    out[kDeqDelayMean] = s.deq_delay_mean / scales.delay_us;
    out[kDeqDelayMax] = s.deq_delay_max / scales.delay_us;
    out[kDeqDelayLast] = s.deq_delay_last / scales.delay_us;
    out[kDeqDepthMean] = s.deq_depth_mean / scales.depth_packets;
    out[kDeqDepthMax] = s.deq_depth_max / scales.depth_packets;
    out[kEnqDepthMean] = s.enq_depth_mean / scales.depth_packets;
    out[kProbeCount] = s.probe_count / scales.expected_probes;
    out[kHopLatencyMean] = s.hop_latency_mean / scales.delay_us;
  }
  f.features[kPathLatencyMean] = agg.path_latency_mean / scales.delay_us;
  f.features[kProbeLossFraction] = agg.probe_loss_fraction;
  f.features[kTargetDelay] = static_cast<double>(in.target_delay) / scales.delay_us;
  for (double& v : f.features) {
    if (!std::isfinite(v)) v = 0.0;
  }
  return f;
}

}  // namespace desired::telemetry
