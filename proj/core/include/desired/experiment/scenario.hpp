#pragma once

#include <optional>
#include <vector>

#include "desired/agent/dqn.hpp"
#include "desired/aqm/switch.hpp"
#include "desired/dash/player.hpp"
#include "desired/experiment/config.hpp"
#include "desired/telemetry/observation.hpp"

namespace desired::experiment {

struct ObservationRow {
  std::int64_t window = 0;
  Time t_start = 0;
  Time t_end = 0;
  Time target_delay = 0;
  std::size_t record_count = 0;
  std::array<double, telemetry::kFeatureCount> features{};
};

struct LoadRow {
  std::int64_t t = 0;
  int instances = 0;
};

struct SwitchReport {
  std::uint32_t switch_id = 0;
  aqm::SwitchStats stats;
  std::uint64_t tail_drops = 0;
  std::uint64_t max_depth_bytes = 0;
};

struct RunStats {
  std::uint64_t events = 0;
  std::int64_t probes_sent = 0;
  std::int64_t probes_received = 0;
  std::uint64_t load_clients_started = 0;
  std::uint64_t video_segments = 0;
  std::uint64_t video_request_retries = 0;
  std::uint64_t bottleneck_tx_bytes = 0;
  std::vector<SwitchReport> switches;
};

struct LearningSignal {
  std::size_t early_updates = 0;
  std::size_t late_updates = 0;
  double early_loss = 0.0;  // mean loss, first quarter of the training period
  double late_loss = 0.0;   // mean loss, final quarter of the run
  double late_reward = 0.0; // summed reward, final quarter of the run
  bool improved() const { return late_updates > 0 && early_updates > 0 && late_loss < early_loss; }
};

/// Quarter statistics of an agent log for a run of \p duration.
LearningSignal learning_signal(const std::vector<agent::AgentLogRow>& log, Time duration);

struct RunResult {
  ExperimentConfig config;
  std::vector<dash::MetricRow> player_log;
  std::vector<agent::AgentLogRow> agent_log;
  std::vector<LoadRow> load_trace;
  std::vector<ObservationRow> observations;
  std::vector<aqm::AqmTraceRow> aqm_trace;
  std::vector<telemetry::CollectedProbe> probes;  // filled when telemetry_dump is set
  dash::PlayerSummary player;
  std::optional<agent::QNetwork> final_network;
  RunStats stats;
};

/// Builds the topology and runs one experiment in memory. Validates first.
RunResult run_scenario(const ExperimentConfig& cfg);

}  // namespace desired::experiment
