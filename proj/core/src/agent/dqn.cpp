#include "desired/agent/dqn.hpp"

#include <algorithm>

namespace desired::agent {

double train_step(QNetwork& online, const QNetwork& target, std::span<const Transition* const> batch,
                  double gamma, NesterovSgd& opt) {
  std::vector<FitSample> samples;
  samples.reserve(batch.size());
  for (const Transition* t : batch) {
    const auto next_q = target.forward(t->next_state);
    const double best = *std::max_element(next_q.begin(), next_q.end());
    samples.push_back(FitSample{t->state, t->action, t->reward + gamma * best});
  }
  std::vector<double> grad;
  const double loss = loss_and_gradient(online, samples, grad);
  opt.step(online.parameters(), grad);
  return loss;
}

bool sync_target(const QNetwork& online, QNetwork& target, std::int64_t updates_done,
                 std::int64_t tau) {
  if (tau <= 0 || updates_done <= 0 || updates_done % tau != 0) return false;
  target = online;
  return true;
}

DqnAgent::DqnAgent(AgentConfig cfg, sim::RngStream& init_rng, sim::RngStream& action_rng,
                   sim::RngStream& sample_rng)
    : cfg_(std::move(cfg)),
      online_(QNetwork::he_uniform(cfg_.layer_sizes, init_rng)),
      target_(online_),
      opt_(cfg_.learning_rate, cfg_.momentum),
      replay_(cfg_.replay_capacity),
      action_rng_(action_rng),
      sample_rng_(sample_rng) {
  if (cfg_.layer_sizes.front() != telemetry::kFeatureCount ||
      cfg_.layer_sizes.back() != kActionCount) {
    throw ShapeError("DqnAgent: network must map 19 features to 3 actions");
  }
  if (cfg_.batch_size == 0 || cfg_.min_fill < cfg_.batch_size) {
    throw std::invalid_argument("DqnAgent: min_fill must be at least the batch size");
  }
  if (cfg_.experience_every <= 0) throw std::invalid_argument("DqnAgent: bad experience cadence");
}

std::optional<double> DqnAgent::learn() {
  if (replay_.size() < cfg_.min_fill) return std::nullopt;
  const auto idx = replay_.sample_indices(cfg_.batch_size, sample_rng_);
  std::vector<const Transition*> batch;
  batch.reserve(idx.size());
  for (auto i : idx) batch.push_back(&replay_.at(i));
  const double loss = train_step(online_, target_, batch, cfg_.gamma, opt_);
  ++updates_;
  if (sync_target(online_, target_, updates_, cfg_.tau)) ++syncs_;
  if (on_update_) on_update_(*this);
  return loss;
}

sim::Time DqnAgent::control_loop_step(const telemetry::ObservationFrame& frame,
                                      const AppMetrics& app, sim::Time current_target) {
  ++windows_;
  AgentLogRow row;
  row.window = windows_;
  row.t = frame.window_end;

  const State state = frame.features;
  if (has_prev_) {
    const double r = compute_reward(prev_app_.lbo, app.lbo, prev_app_.fps, app.fps);
    row.reward = r;
    if (windows_ % cfg_.experience_every == 0) {
      replay_.push(Transition{prev_state_, prev_action_, r, state});
      row.loss = learn();
    }
  }

  const double eps = epsilon_at(actions_, cfg_.epsilon);
  const auto q = online_.forward(state);
  const std::uint8_t a = act(q, eps, action_rng_);
  ++actions_;
  const sim::Time next = apply_action(a, current_target, cfg_.bounds);

  row.epsilon = eps;
  row.action = a;
  row.target_delay = next;
  row.replay_fill = replay_.size();
  log_.push_back(row);

  has_prev_ = true;
  prev_state_ = state;
  prev_action_ = a;
  prev_app_ = app;
  return next;
}

}  // namespace desired::agent
