#include "desired/experiment/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace desired::experiment {

using nlohmann::json;

const char* to_string(aqm::AqmMode m) { return m == aqm::AqmMode::kFixed ? "fixed" : "dynamic"; }

namespace {

constexpr double kFullDuration = 3600.0;
constexpr std::int64_t kFullDecaySteps = 250;
constexpr std::size_t kFullMinFill = 100;

aqm::AqmMode mode_from_string(const std::string& s) {
  if (s == "fixed") return aqm::AqmMode::kFixed;
  if (s == "dynamic") return aqm::AqmMode::kDynamic;
  throw ConfigError("aqm.mode must be \"fixed\" or \"dynamic\", got \"" + s + "\"");
}

// Rejects keys of \p obj not listed in \p allowed.
void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items()) {
    if (ok.count(k) == 0) throw ConfigError("unknown key " + where + "." + k);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for " + where + "." + key + ": " + it->dump());
  }
}

}  // namespace

void set_load(ExperimentConfig& cfg, const std::string& load) {
  const double d = static_cast<double>(cfg.duration_s);
  if (load == "low") {
    cfg.load = loadgen::LoadPattern::constant(10, d);
  } else if (load == "high") {
    cfg.load = loadgen::LoadPattern::constant(40, d);
  } else if (load == "sinusoid") {
    cfg.load = loadgen::LoadPattern::sinusoid(d);
  } else {
    throw ConfigError("unknown load \"" + load + "\" (low, high, sinusoid)");
  }
  cfg.load_name = load;
}

void set_arm(ExperimentConfig& cfg, const std::string& arm) {
  if (arm == "desired") {
    cfg.mode = aqm::AqmMode::kDynamic;
  } else if (arm.rfind("ired-", 0) == 0) {
    const std::string ms = arm.substr(5);
    if (ms != "5" && ms != "20" && ms != "50" && ms != "100") {
      throw ConfigError("unknown arm \"" + arm + "\" (ired-5, ired-20, ired-50, ired-100, desired)");
    }
    cfg.mode = aqm::AqmMode::kFixed;
    cfg.fixed_target = sim::milliseconds(std::stoll(ms));
  } else {
    throw ConfigError("unknown arm \"" + arm + "\" (ired-5, ired-20, ired-50, ired-100, desired)");
  }
  cfg.scenario = arm;
}

void set_duration(ExperimentConfig& cfg, std::int64_t duration_s, bool rescale_agent) {
  cfg.duration_s = duration_s;
  cfg.load.duration_s = static_cast<double>(duration_s);
  if (rescale_agent) {
    const double f = static_cast<double>(duration_s) / kFullDuration;
    cfg.agent.epsilon.decay_steps =
        std::max<std::int64_t>(1, std::llround(static_cast<double>(kFullDecaySteps) * f));
    const auto fill = static_cast<std::size_t>(std::llround(static_cast<double>(kFullMinFill) * f));
    cfg.agent.min_fill = std::min(kFullMinFill, std::max(cfg.agent.batch_size, fill));
  }
}

ExperimentConfig make_config(const std::string& arm, const std::string& load,
                             const std::string& preset) {
  ExperimentConfig cfg;
  set_arm(cfg, arm);
  if (preset == "full") {
    cfg.duration_s = 3600;
  } else if (preset == "desk") {
    cfg.duration_s = 600;
  } else {
    throw ConfigError("unknown preset \"" + preset + "\" (full, desk)");
  }
  set_load(cfg, load);
  set_duration(cfg, cfg.duration_s, true);
  cfg.output_dir = "out/" + arm + "-" + load + "-s" + std::to_string(cfg.seed);
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.scenario.empty()) throw ConfigError("scenario name must not be empty");
  if (cfg.duration_s <= 0) throw ConfigError("duration_s must be positive");
  if (cfg.duration_s > 30 * 86400) throw ConfigError("duration_s exceeds 30 days");
  if (cfg.mode == aqm::AqmMode::kFixed) {
    const Time t = cfg.fixed_target;
    const bool standard = t == sim::milliseconds(5) || t == sim::milliseconds(20) ||
                          t == sim::milliseconds(50) || t == sim::milliseconds(100);
    if (t <= 0) throw ConfigError("aqm.target_us must be positive");
    if (!standard && !cfg.allow_custom_target) {
      throw ConfigError("fixed target must be 5, 20, 50 or 100 ms unless allow_custom_target is set");
    }
  } else {
    if (cfg.initial_target < aqm::kMinDynamicTarget || cfg.initial_target > aqm::kMaxDynamicTarget) {
      throw ConfigError("aqm.initial_target_us must lie in [20 ms, 70 ms]");
    }
  }
  if (!(cfg.max_p > 0.0 && cfg.max_p <= 1.0)) throw ConfigError("aqm.max_p must be in (0, 1]");
  try {
    loadgen::validate(cfg.load);
  } catch (const loadgen::PatternError& e) {
    throw ConfigError(e.what());
  }
  if (std::llround(cfg.load.duration_s) != cfg.duration_s) {
    throw ConfigError("load duration must equal the run duration");
  }
  const auto& t = cfg.topology;
  if (t.access_bps <= 0 || t.bottleneck_bps <= 0) throw ConfigError("link capacities must be positive");
  if (t.link_delay < 0) throw ConfigError("topology.link_delay_us must be >= 0");
  if (t.mtu < 100) throw ConfigError("topology.mtu must be at least 100");
  if (t.port_buffer_bytes < t.mtu) throw ConfigError("topology.port_buffer_bytes below one MTU");
  if (cfg.probe_period <= 0) throw ConfigError("telemetry.probe_period_us must be positive");
  if (cfg.window <= 0 || cfg.window % sim::kSecond != 0) {
    throw ConfigError("telemetry.window_us must be a positive whole number of seconds");
  }
  if (cfg.control_latency < 0) throw ConfigError("agent.control_latency_us must be >= 0");
  const auto& a = cfg.agent;
  if (a.batch_size == 0) throw ConfigError("agent.batch_size must be positive");
  if (a.min_fill < a.batch_size) throw ConfigError("agent.min_fill must be >= agent.batch_size");
  if (a.replay_capacity < a.min_fill) throw ConfigError("agent.replay_capacity below min_fill");
  if (a.tau <= 0) throw ConfigError("agent.tau must be positive");
  if (a.experience_every <= 0) throw ConfigError("agent.experience_every must be positive");
  if (!(a.gamma >= 0.0 && a.gamma <= 1.0)) throw ConfigError("agent.gamma must be in [0, 1]");
  if (!(a.learning_rate > 0.0)) throw ConfigError("agent.learning_rate must be positive");
  if (!(a.momentum >= 0.0 && a.momentum < 1.0)) throw ConfigError("agent.momentum must be in [0, 1)");
  const auto& e = a.epsilon;
  if (e.decay_steps <= 0) throw ConfigError("agent.epsilon.decay_steps must be positive");
  if (!(e.floor >= 0.0 && e.floor <= e.linear_end && e.linear_end <= e.start && e.start <= 1.0)) {
    throw ConfigError("agent.epsilon needs 0 <= floor <= linear_end <= start <= 1");
  }
  if (!(e.factor > 0.0 && e.factor <= 1.0)) throw ConfigError("agent.epsilon.factor must be in (0, 1]");
  if (cfg.output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

json to_json(const ExperimentConfig& c) {
  const auto& e = c.agent.epsilon;
  return json{
      {"scenario", c.scenario},
      {"seed", c.seed},
      {"duration_s", c.duration_s},
      {"output_dir", c.output_dir},
      {"aqm_trace", c.aqm_trace},
      {"aqm",
       {{"mode", to_string(c.mode)},
        {"target_us", c.fixed_target},
        {"initial_target_us", c.initial_target},
        {"allow_custom_target", c.allow_custom_target},
        {"max_p", c.max_p}}},
      {"load",
       {{"name", c.load_name},
        {"kind", loadgen::to_string(c.load.kind)},
        {"n", c.load.n},
        {"amplitude", c.load.amplitude},
        {"offset", c.load.offset},
        {"frequency", c.load.frequency},
        {"phase", c.load.phase}}},
      {"topology",
       {{"access_bps", c.topology.access_bps},
        {"bottleneck_bps", c.topology.bottleneck_bps},
        {"link_delay_us", c.topology.link_delay},
        {"mtu", c.topology.mtu},
        {"port_buffer_bytes", c.topology.port_buffer_bytes}}},
      {"telemetry",
       {{"probe_period_us", c.probe_period}, {"window_us", c.window}, {"dump", c.telemetry_dump}}},
      {"agent",
       {{"gamma", c.agent.gamma},
        {"learning_rate", c.agent.learning_rate},
        {"momentum", c.agent.momentum},
        {"batch_size", c.agent.batch_size},
        {"replay_capacity", c.agent.replay_capacity},
        {"min_fill", c.agent.min_fill},
        {"tau", c.agent.tau},
        {"experience_every", c.agent.experience_every},
        {"control_latency_us", c.control_latency},
        {"epsilon",
         {{"start", e.start},
          {"linear_end", e.linear_end},
          {"decay_steps", e.decay_steps},
          {"factor", e.factor},
          {"floor", e.floor}}}}},
  };
}

ExperimentConfig from_json(const json& j, ExperimentConfig c) {
  check_keys(j, "config",
             {"scenario", "seed", "duration_s", "output_dir", "aqm_trace", "aqm", "load",
              "topology", "telemetry", "agent", "arm", "preset"});
  // Shorthands first so explicit sections can refine them.
  if (j.contains("preset") || j.contains("arm")) {
    std::string arm = c.scenario, preset = "desk";
    read(j, "arm", arm, "config");
    read(j, "preset", preset, "config");
    std::string load = c.load_name;
    if (j.contains("load")) read(j["load"], "name", load, "load");
    const auto seed = c.seed;
    c = make_config(arm, load, preset);
    c.seed = seed;
  }
  read(j, "scenario", c.scenario, "config");
  read(j, "seed", c.seed, "config");
  read(j, "output_dir", c.output_dir, "config");
  read(j, "aqm_trace", c.aqm_trace, "config");
  if (j.contains("duration_s")) {
    std::int64_t d = c.duration_s;
    read(j, "duration_s", d, "config");
    set_duration(c, d, true);
  }
  if (j.contains("aqm")) {
    const auto& a = j["aqm"];
    check_keys(a, "aqm", {"mode", "target_us", "initial_target_us", "allow_custom_target", "max_p"});
    std::string mode = to_string(c.mode);
    read(a, "mode", mode, "aqm");
    c.mode = mode_from_string(mode);
    read(a, "target_us", c.fixed_target, "aqm");
    read(a, "initial_target_us", c.initial_target, "aqm");
    read(a, "allow_custom_target", c.allow_custom_target, "aqm");
    read(a, "max_p", c.max_p, "aqm");
  }
  if (j.contains("load")) {
    const auto& l = j["load"];
    check_keys(l, "load", {"name", "kind", "n", "amplitude", "offset", "frequency", "phase"});
    std::string name = c.load_name;
    read(l, "name", name, "load");
    if (name != c.load_name) set_load(c, name);
    std::string kind = loadgen::to_string(c.load.kind);
    read(l, "kind", kind, "load");
    try {
      c.load.kind = loadgen::pattern_kind_from_string(kind);
    } catch (const loadgen::PatternError& e) {
      throw ConfigError(e.what());
    }
    read(l, "n", c.load.n, "load");
    read(l, "amplitude", c.load.amplitude, "load");
    read(l, "offset", c.load.offset, "load");
    read(l, "frequency", c.load.frequency, "load");
    read(l, "phase", c.load.phase, "load");
    c.load.duration_s = static_cast<double>(c.duration_s);
  }
  if (j.contains("topology")) {
    const auto& t = j["topology"];
    check_keys(t, "topology", {"access_bps", "bottleneck_bps", "link_delay_us", "mtu", "port_buffer_bytes"});
    read(t, "access_bps", c.topology.access_bps, "topology");
    read(t, "bottleneck_bps", c.topology.bottleneck_bps, "topology");
    read(t, "link_delay_us", c.topology.link_delay, "topology");
    read(t, "mtu", c.topology.mtu, "topology");
    read(t, "port_buffer_bytes", c.topology.port_buffer_bytes, "topology");
  }
  if (j.contains("telemetry")) {
    const auto& t = j["telemetry"];
    check_keys(t, "telemetry", {"probe_period_us", "window_us", "dump"});
    read(t, "probe_period_us", c.probe_period, "telemetry");
    read(t, "window_us", c.window, "telemetry");
    read(t, "dump", c.telemetry_dump, "telemetry");
  }
  if (j.contains("agent")) {
    const auto& a = j["agent"];
    check_keys(a, "agent",
               {"gamma", "learning_rate", "momentum", "batch_size", "replay_capacity", "min_fill",
                "tau", "experience_every", "control_latency_us", "epsilon"});
    read(a, "gamma", c.agent.gamma, "agent");
    read(a, "learning_rate", c.agent.learning_rate, "agent");
    read(a, "momentum", c.agent.momentum, "agent");
    read(a, "batch_size", c.agent.batch_size, "agent");
    read(a, "replay_capacity", c.agent.replay_capacity, "agent");
    read(a, "min_fill", c.agent.min_fill, "agent");
    read(a, "tau", c.agent.tau, "agent");
    read(a, "experience_every", c.agent.experience_every, "agent");
    read(a, "control_latency_us", c.control_latency, "agent");
    if (a.contains("epsilon")) {
      const auto& e = a["epsilon"];
      check_keys(e, "agent.epsilon", {"start", "linear_end", "decay_steps", "factor", "floor"});
      read(e, "start", c.agent.epsilon.start, "agent.epsilon");
      read(e, "linear_end", c.agent.epsilon.linear_end, "agent.epsilon");
      read(e, "decay_steps", c.agent.epsilon.decay_steps, "agent.epsilon");
      read(e, "factor", c.agent.epsilon.factor, "agent.epsilon");
      read(e, "floor", c.agent.epsilon.floor, "agent.epsilon");
    }
  }
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace desired::experiment
