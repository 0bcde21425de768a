#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include "desired/sim/rng.hpp"
#include "desired/sim/time.hpp"

namespace desired::agent {

enum Action : std::uint8_t { kIncrease = 0, kDecrease = 1, kHold = 2 };
inline constexpr std::size_t kActionCount = 3;

struct EpsilonSchedule {
  double start = 1.0;
  double linear_end = 0.5;
  std::int64_t decay_steps = 250;
  double factor = 0.99;
  double floor = 0.01;
};

/// Linear from start to linear_end over decay_steps, then geometric decay by
/// factor per step down to floor.
double epsilon_at(std::int64_t step, const EpsilonSchedule& s = {});

/// Uniform action with probability epsilon, otherwise argmax with the lowest
/// index winning ties. One uniform draw always; a second only when exploring.
std::uint8_t act(std::span<const double> q, double epsilon, sim::RngStream& rng);

std::size_t argmax(std::span<const double> q);

struct DelayBounds {
  sim::Time min = sim::milliseconds(20);
  sim::Time max = sim::milliseconds(70);
  sim::Time step_up = sim::milliseconds(2);
  sim::Time step_down = sim::milliseconds(1);
};

class ActionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// New target delay. Throws ActionError for an unknown action or a current
/// target outside the bounds.
sim::Time apply_action(std::uint8_t action, sim::Time current, const DelayBounds& b = {});

/// Nearest of {18, 24, 30}; halfway values go to the lower one.
double bucket_fps(double fps);

/// Reward for moving from (lbo_t, fps_t) to (lbo_t1, fps_t1). fps_t1 is
/// bucketed; fps_t does not influence the result.
double compute_reward(double lbo_t, double lbo_t1, double fps_t, double fps_t1);

}  // namespace desired::agent
