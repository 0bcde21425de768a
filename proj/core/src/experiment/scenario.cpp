#include "desired/experiment/scenario.hpp"

#include <memory>

#include "desired/dash/client.hpp"
#include "desired/loadgen/pattern.hpp"
#include "desired/sim/host.hpp"
#include "desired/sim/network.hpp"
#include "desired/telemetry/probe.hpp"

namespace desired::experiment {

LearningSignal learning_signal(const std::vector<agent::AgentLogRow>& log, Time duration) {
  LearningSignal s;
  Time first_update = -1;
  for (const auto& r : log) {
    if (r.loss) {
      first_update = r.t;
      break;
    }
  }
  const Time late_from = duration - duration / 4;
  for (const auto& r : log) {
    if (r.t > late_from && r.reward) s.late_reward += *r.reward;
  }
  if (first_update < 0) return s;
  const Time early_to = first_update + (duration - first_update) / 4;
  for (const auto& r : log) {
    if (!r.loss) continue;
    if (r.t <= early_to) {
      s.early_loss += *r.loss;
      ++s.early_updates;
    }
    if (r.t > late_from) {
      s.late_loss += *r.loss;
      ++s.late_updates;
    }
  }
  if (s.early_updates > 0) s.early_loss /= static_cast<double>(s.early_updates);
  if (s.late_updates > 0) s.late_loss /= static_cast<double>(s.late_updates);
  return s;
}

namespace {

constexpr sim::FlowId kVideoFlow = 1;

class Scenario {
 public:
  explicit Scenario(const ExperimentConfig& cfg, RunResult& out)
      : cfg_(cfg), out_(out), sim_(cfg.seed), net_(sim_) {}

  void build();
  void run();

 private:
  void on_video_tick(const dash::MetricRow& row);
  void reconcile_load(std::int64_t t);
  void apply_target(Time t);

  const ExperimentConfig& cfg_;
  RunResult& out_;
  sim::Simulator sim_;
  sim::Network net_;
  sim::Host* server_ = nullptr;
  sim::Host* video_host_ = nullptr;
  sim::Host* load_host_ = nullptr;
  std::vector<aqm::Switch*> switches_;
  aqm::Switch* bottleneck_switch_ = nullptr;
  sim::PortIndex bottleneck_port_ = 0;
  std::unique_ptr<dash::DashServer> dash_server_;
  std::unique_ptr<dash::DashClient> video_;
  std::unique_ptr<telemetry::ProbeEmitter> emitter_;
  std::unique_ptr<telemetry::ProbeCollector> collector_;
  std::unique_ptr<agent::DqnAgent> agent_;
  struct LoadInstance {
    std::uint64_t id;
    std::unique_ptr<dash::DashClient> client;
  };
  std::vector<LoadInstance> load_;
  sim::FlowId next_flow_ = kVideoFlow + 1;
  Time target_ = 0;
  Time duration_ = 0;
};

void Scenario::build() {
  duration_ = sim::seconds(cfg_.duration_s);
  const auto& topo = cfg_.topology;
  const auto buf = topo.port_buffer_bytes;

  server_ = &net_.add_node<sim::Host>("server");
  aqm::SwitchConfig sc;
  sc.mode = cfg_.mode;
  sc.max_p = cfg_.max_p;
  sc.target_delay = cfg_.mode == aqm::AqmMode::kFixed ? cfg_.fixed_target : cfg_.initial_target;
  target_ = sc.target_delay;
  sc.switch_id = 1;
  auto& s1 = net_.add_node<aqm::Switch>("s1", sc);
  sc.switch_id = 2;
  auto& s2 = net_.add_node<aqm::Switch>("s2", sc);
  video_host_ = &net_.add_node<sim::Host>("video-client");
  load_host_ = &net_.add_node<sim::Host>("load-clients");
  switches_ = {&s1, &s2};

  net_.connect(*server_, s1, topo.access_bps, topo.link_delay, topo.mtu, buf, buf);
  const auto [p12, p21] = net_.connect(s1, s2, topo.bottleneck_bps, topo.link_delay, topo.mtu, buf, buf);
  (void)p21;
  net_.connect(s2, *video_host_, topo.access_bps, topo.link_delay, topo.mtu, buf, buf);
  net_.connect(s2, *load_host_, topo.access_bps, topo.link_delay, topo.mtu, buf, buf);
  net_.compute_routes();
  bottleneck_switch_ = &s1;
  bottleneck_port_ = p12;

  if (cfg_.aqm_trace) {
    for (auto* sw : switches_) {
      sw->set_trace([this](const aqm::AqmTraceRow& r) { out_.aqm_trace.push_back(r); });
    }
  }

  dash_server_ = std::make_unique<dash::DashServer>(sim_, *server_, cfg_.client.tcp);
  dash::ClientConfig vc = cfg_.client;
  vc.record_metrics = true;
  video_ = std::make_unique<dash::DashClient>(sim_, *video_host_, server_->id(), kVideoFlow, vc);
  video_->set_tick_observer([this](const dash::MetricRow& row) { on_video_tick(row); });

  emitter_ = std::make_unique<telemetry::ProbeEmitter>(sim_, *server_, video_host_->id(),
                                                       cfg_.probe_period);
  collector_ = std::make_unique<telemetry::ProbeCollector>(*video_host_);

  if (cfg_.mode == aqm::AqmMode::kDynamic) {
    agent_ = std::make_unique<agent::DqnAgent>(cfg_.agent, sim_.rng_stream("agent/init"),
                                               sim_.rng_stream("agent/action"),
                                               sim_.rng_stream("agent/replay"));
  }
}

void Scenario::apply_target(Time t) {
  aqm::apply_target_delay(switches_, t);
}

void Scenario::on_video_tick(const dash::MetricRow& row) {
  const Time now = sim_.now();
  if (now % cfg_.window != 0) return;
  ObservationRow obs;
  obs.window = now / cfg_.window;
  obs.t_start = now - cfg_.window;
  obs.t_end = now;
  obs.target_delay = target_;

  telemetry::WindowInput in;
  in.window_start = obs.t_start;
  in.window_end = obs.t_end;
  in.probes = collector_->received_between(obs.t_start, obs.t_end);
  in.probes_sent = emitter_->sent_between(obs.t_start, obs.t_end);
  in.target_delay = target_;
  telemetry::FeatureScales scales;
  scales.expected_probes = static_cast<double>(cfg_.window) / static_cast<double>(cfg_.probe_period);
  const auto frame = telemetry::aggregate_observation(in, scales);
  obs.record_count = frame.record_count;
  obs.features = frame.features;
  out_.observations.push_back(obs);

  if (!agent_) return;
  const Time next = agent_->control_loop_step(frame, agent::AppMetrics{row.lbo, row.fps}, target_);
  target_ = next;
  if (cfg_.control_latency == 0) {
    apply_target(next);
  } else {
    sim_.schedule_in(cfg_.control_latency, [this, next] { apply_target(next); });
  }
}

void Scenario::reconcile_load(std::int64_t t) {
  const int want = loadgen::instances_at(static_cast<double>(t), cfg_.load);
  std::vector<std::uint64_t> running;
  running.reserve(load_.size());
  for (const auto& inst : load_) running.push_back(inst.id);
  const auto plan = loadgen::reconcile(running, want);
  for (std::size_t i = 0; i < plan.stop.size(); ++i) {
    auto& inst = load_.back();
    inst.client->stop();
    dash_server_->close(inst.client->flow());
    load_.pop_back();
  }
  dash::ClientConfig lc = cfg_.client;
  lc.record_metrics = false;
  for (int i = 0; i < plan.start; ++i) {
    const sim::FlowId flow = next_flow_++;
    auto client = std::make_unique<dash::DashClient>(sim_, *load_host_, server_->id(), flow, lc);
    client->start(duration_);
    load_.push_back(LoadInstance{flow, std::move(client)});
    ++out_.stats.load_clients_started;
  }
  out_.load_trace.push_back(LoadRow{t, static_cast<int>(load_.size())});
  if (t + 1 < cfg_.duration_s) {
    sim_.schedule(sim::seconds(t + 1), [this, t] { reconcile_load(t + 1); });
  }
}

void Scenario::run() {
  sim_.schedule(0, [this] {
    video_->start(duration_);
    reconcile_load(0);
    emitter_->start(0, duration_);
  });
  const auto summary = sim_.run_until(duration_);

  out_.player_log = video_->player().metric_log;
  out_.player = dash::summarize(out_.player_log);
  if (agent_) {
    out_.agent_log = agent_->log();
    out_.final_network = agent_->online();
  }
  if (cfg_.telemetry_dump) out_.probes = collector_->probes();

  auto& st = out_.stats;
  st.events = summary.dispatched;
  st.probes_sent = emitter_->sent();
  st.probes_received = static_cast<std::int64_t>(collector_->probes().size());
  st.video_segments = video_->segments_downloaded();
  st.video_request_retries = video_->request_retries();
  st.bottleneck_tx_bytes = bottleneck_switch_->port(bottleneck_port_).stats().total_tx_bytes();
  for (auto* sw : switches_) {
    SwitchReport r;
    r.switch_id = sw->switch_id();
    r.stats = sw->stats();
    for (std::size_t p = 0; p < sw->port_count(); ++p) {
      const auto& ps = sw->port(static_cast<sim::PortIndex>(p)).stats();
      r.tail_drops += ps.tail_drops;
      r.max_depth_bytes = std::max(r.max_depth_bytes, ps.max_depth_bytes);
    }
    st.switches.push_back(r);
  }
}

}  // namespace

RunResult run_scenario(const ExperimentConfig& cfg) {
  validate(cfg);
  RunResult out;
  out.config = cfg;
  Scenario s(cfg, out);
  s.build();
  s.run();
  return out;
}

}  // namespace desired::experiment
