#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "desired/agent/policy.hpp"
#include "desired/agent/qnetwork.hpp"
#include "desired/agent/replay.hpp"
#include "desired/telemetry/observation.hpp"

namespace desired::agent {

struct AgentConfig {
  std::vector<std::size_t> layer_sizes{telemetry::kFeatureCount, 24, 24, kActionCount};
  double gamma = 0.99;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  std::size_t batch_size = 32;
  std::size_t replay_capacity = 1'000'000;
  std::size_t min_fill = 100;
  std::int64_t tau = 100;
  std::int64_t experience_every = 2;  // windows between stored transitions
  EpsilonSchedule epsilon;
  DelayBounds bounds;
};

/// Regression targets r + gamma * max_a' Q_target(s', a'), one step of
/// \p opt on the online network. Returns the loss before the update.
double train_step(QNetwork& online, const QNetwork& target, std::span<const Transition* const> batch,
                  double gamma, NesterovSgd& opt);

/// Copies online into target when updates_done is a positive multiple of
/// tau. Returns whether a copy happened.
bool sync_target(const QNetwork& online, QNetwork& target, std::int64_t updates_done,
                 std::int64_t tau);

struct AppMetrics {
  double lbo = 0.0;
  double fps = 0.0;
};

struct AgentLogRow {
  std::int64_t window = 0;
  sim::Time t = 0;
  double epsilon = 0.0;
  std::uint8_t action = kHold;
  sim::Time target_delay = 0;
  std::optional<double> reward;
  std::optional<double> loss;
  std::size_t replay_fill = 0;
};

class DqnAgent {
 public:
  DqnAgent(AgentConfig cfg, sim::RngStream& init_rng, sim::RngStream& action_rng,
           sim::RngStream& sample_rng);

  /// One control-plane step at the end of a window. Returns the new target.
  sim::Time control_loop_step(const telemetry::ObservationFrame& frame, const AppMetrics& app,
                              sim::Time current_target);

  const QNetwork& online() const noexcept { return online_; }
  const QNetwork& target() const noexcept { return target_; }
  const ReplayBuffer& replay() const noexcept { return replay_; }
  const std::vector<AgentLogRow>& log() const noexcept { return log_; }
  std::int64_t updates_done() const noexcept { return updates_; }
  std::int64_t actions_taken() const noexcept { return actions_; }
  std::int64_t syncs() const noexcept { return syncs_; }
  const AgentConfig& config() const noexcept { return cfg_; }

  /// Observer called after every parameter update (for tests/traces).
  using UpdateObserver = std::function<void(const DqnAgent&)>;
  void set_update_observer(UpdateObserver obs) { on_update_ = std::move(obs); }

 private:
  std::optional<double> learn();

  AgentConfig cfg_;
  QNetwork online_;
  QNetwork target_;
  NesterovSgd opt_;
  ReplayBuffer replay_;
  sim::RngStream& action_rng_;
  sim::RngStream& sample_rng_;
  std::int64_t windows_ = 0;
  std::int64_t updates_ = 0;
  std::int64_t actions_ = 0;
  std::int64_t syncs_ = 0;
  bool has_prev_ = false;
  State prev_state_{};
  std::uint8_t prev_action_ = kHold;
  AppMetrics prev_app_;
  std::vector<AgentLogRow> log_;
  UpdateObserver on_update_;
};

}  // namespace desired::agent
