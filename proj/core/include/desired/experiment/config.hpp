#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "desired/agent/dqn.hpp"
#include "desired/aqm/aqm.hpp"
#include "desired/dash/client.hpp"
#include "desired/loadgen/pattern.hpp"

namespace desired::experiment {

using sim::Time;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TopologyConfig {
  std::int64_t access_bps = 100'000'000;
  std::int64_t bottleneck_bps = 25'000'000;
  Time link_delay = sim::milliseconds(5);
  std::uint32_t mtu = 1500;
  std::uint64_t port_buffer_bytes = 2'000'000;
};

struct ExperimentConfig {
  std::string scenario = "desired";
  aqm::AqmMode mode = aqm::AqmMode::kDynamic;
  Time fixed_target = sim::milliseconds(20);   // fixed mode
  Time initial_target = sim::milliseconds(20); // dynamic mode
  bool allow_custom_target = false;
  double max_p = aqm::kDefaultMaxP;
  std::string load_name = "sinusoid";
  loadgen::LoadPattern load = loadgen::LoadPattern::sinusoid(3600.0);
  std::int64_t duration_s = 3600;
  std::uint64_t seed = 1;
  TopologyConfig topology;
  std::string output_dir = "out";
  bool aqm_trace = false;
  bool telemetry_dump = false;
  Time probe_period = sim::milliseconds(10);
  Time window = sim::seconds(4);
  Time control_latency = 0;
  agent::AgentConfig agent;
  dash::ClientConfig client;
};

/// Arms: "ired-5", "ired-20", "ired-50", "ired-100", "desired".
/// Loads: "low", "high", "sinusoid". Presets: "full" (3600 s), "desk" (600 s).
ExperimentConfig make_config(const std::string& arm, const std::string& load,
                             const std::string& preset = "desk");

/// Re-derives load, epsilon decay and min_fill for a new duration the way the
/// presets do.
void set_duration(ExperimentConfig& cfg, std::int64_t duration_s, bool rescale_agent);

void set_arm(ExperimentConfig& cfg, const std::string& arm);
void set_load(ExperimentConfig& cfg, const std::string& load);

/// Throws ConfigError with a description of the first problem found.
void validate(const ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Applies keys in \p j on top of \p base. Unknown keys are rejected.
ExperimentConfig from_json(const nlohmann::json& j, ExperimentConfig base = {});

ExperimentConfig load_config_file(const std::string& path);

const char* to_string(aqm::AqmMode m);

}  // namespace desired::experiment
