#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "desired/experiment/scenario.hpp"

namespace desired::experiment {

inline constexpr const char* kSummarySchema = "desired-summary/1";

// File names inside an artifact directory.
inline constexpr const char* kPlayerCsv = "player_metrics.csv";
inline constexpr const char* kAgentCsv = "agent_log.csv";
inline constexpr const char* kLoadCsv = "load_trace.csv";
inline constexpr const char* kObservationsCsv = "observations.csv";
inline constexpr const char* kAqmTraceCsv = "aqm_trace.csv";
inline constexpr const char* kTelemetryCsv = "telemetry.csv";
inline constexpr const char* kSummaryJson = "summary.json";
inline constexpr const char* kConfigJson = "config.json";
inline constexpr const char* kSnapshotFile = "qnet.txt";

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

void write_player_csv(std::ostream& out, const std::vector<dash::MetricRow>& rows);
void write_agent_csv(std::ostream& out, const std::vector<agent::AgentLogRow>& rows);
void write_load_csv(std::ostream& out, const std::vector<LoadRow>& rows);
void write_observations_csv(std::ostream& out, const std::vector<ObservationRow>& rows);
void write_aqm_trace_csv(std::ostream& out, const std::vector<aqm::AqmTraceRow>& rows);
void write_telemetry_csv(std::ostream& out, const std::vector<telemetry::CollectedProbe>& probes);

nlohmann::json summary_json(const RunResult& r);

/// Writes every artifact of \p r into \p dir (created if missing). Returns
/// the list of files written.
std::vector<std::string> write_artifacts(const RunResult& r, const std::string& dir);

/// run_scenario followed by write_artifacts into cfg.output_dir.
RunResult run_experiment(const ExperimentConfig& cfg);

}  // namespace desired::experiment
