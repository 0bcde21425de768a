#include "desired/aqm/aqm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace desired::aqm {

const char* to_string(Decision d) {
  switch (d) {
    case Decision::kPass: return "pass";
    case Decision::kMark: return "mark";
    case Decision::kNotifyDrop: return "notify-drop";
  }
  return "?";
}

AqmState AqmState::make(AqmMode mode, Time target, std::size_t port_count, double max_p) {
  if (target <= 0) throw TargetDelayError("target delay must be positive");
  if (!(max_p > 0.0 && max_p <= 1.0)) throw std::invalid_argument("max_p must be in (0, 1]");
  if (mode == AqmMode::kDynamic) validate_dynamic_target(target);
  AqmState s;
  s.mode = mode;
  s.target_delay = target;
  s.max_p = max_p;
  s.ports.resize(port_count);
  return s;
}

Time ewma_update(Time prev_avg, Time sample) { return (sample + prev_avg) >> 1; }

double red_probability(Time avg_delay, const AqmState& state) {
  const Time lo = state.min_th();
  const Time hi = state.max_th();
  if (avg_delay < lo) return 0.0;
  if (avg_delay >= hi) return 1.0;
  return state.max_p * static_cast<double>(avg_delay - lo) / static_cast<double>(hi - lo);
}

double coupled_mark_probability(double drop_probability) {
  return std::min(1.0, 2.0 * std::sqrt(drop_probability));
}

EgressOutcome egress_decide(const QueueSample& sample, AqmState& state, PacketView pkt,
                            sim::RngStream& rng) {
  auto& port = state.ports.at(sample.port);
  port.avg_delay = ewma_update(port.avg_delay, sample.deq_timedelta);
  EgressOutcome out;
  out.probability = red_probability(port.avg_delay, state);
  if (out.probability <= 0.0) return out;
  const double u = rng.uniform();
  if (pkt.ect) {
    if (u < coupled_mark_probability(out.probability)) out.decision = Decision::kMark;
  } else if (u < out.probability) {
    out.decision = Decision::kNotifyDrop;
  }
  return out;
}

IngressVerdict ingress_check(PacketView pkt, PortIndex port, AqmState& state) {
  auto& p = state.ports.at(port);
  if (pkt.notification) {
    p.drop_flag = true;
    return IngressVerdict::kConsumed;
  }
  if (p.drop_flag) {
    p.drop_flag = false;
    return IngressVerdict::kDrop;
  }
  return IngressVerdict::kForward;
}

void validate_dynamic_target(Time target) {
  if (target < kMinDynamicTarget || target > kMaxDynamicTarget) {
    throw TargetDelayError("target delay " + std::to_string(target) + "us outside [" +
                           std::to_string(kMinDynamicTarget) + ", " +
                           std::to_string(kMaxDynamicTarget) + "]us");
  }
}

void set_target_delay(AqmState& state, Time target) {
  if (state.mode != AqmMode::kDynamic) {
    throw std::logic_error("target delay of a fixed-mode AQM cannot change");
  }
  validate_dynamic_target(target);
  state.target_delay = target;
}

}  // namespace desired::aqm
