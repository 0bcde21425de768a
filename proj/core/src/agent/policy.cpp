#include "desired/agent/policy.hpp"

#include <algorithm>
#include <cmath>

namespace desired::agent {

double epsilon_at(std::int64_t step, const EpsilonSchedule& s) {
  if (step < 0) throw std::invalid_argument("epsilon_at: negative step");
  if (step < s.decay_steps) {
    return s.start - (s.start - s.linear_end) * static_cast<double>(step) /
                         static_cast<double>(s.decay_steps);
  }
  const double e = s.linear_end * std::pow(s.factor, static_cast<double>(step - s.decay_steps));
  return std::max(s.floor, e);
}

std::size_t argmax(std::span<const double> q) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (q[i] > q[best]) best = i;
  }
  return best;
}

std::uint8_t act(std::span<const double> q, double epsilon, sim::RngStream& rng) {
  if (q.size() != kActionCount) throw ActionError("act: expected three q-values");
  if (rng.uniform() < epsilon) return static_cast<std::uint8_t>(rng.uniform_int(kActionCount));
  return static_cast<std::uint8_t>(argmax(q));
}

sim::Time apply_action(std::uint8_t action, sim::Time current, const DelayBounds& b) {
  if (current < b.min || current > b.max) throw ActionError("apply_action: target out of range");
  switch (action) {
    case kIncrease: return std::min(b.max, current + b.step_up);
    case kDecrease: return std::max(b.min, current - b.step_down);
    case kHold: return current;
    default: throw ActionError("apply_action: unknown action");
  }
}

double bucket_fps(double fps) {
  if (fps <= 21.0) return 18.0;
  if (fps <= 27.0) return 24.0;
  return 30.0;
}

double compute_reward(double lbo_t, double lbo_t1, double /*fps_t*/, double fps_t1) {
  const double fps = bucket_fps(fps_t1);
  if (lbo_t1 > 30.0) return 2.0;
  if (fps == 30.0) return 1.0;
  if (fps == 24.0) return 0.5;
  return lbo_t1 >= lbo_t ? 0.1 : -2.0;
}

}  // namespace desired::agent
