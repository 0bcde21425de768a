// Acceptance suite. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero if any fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "desired/agent/dqn.hpp"
#include "desired/aqm/aqm.hpp"
#include "desired/aqm/switch.hpp"
#include "desired/experiment/artifacts.hpp"
#include "desired/experiment/config.hpp"
#include "desired/experiment/scenario.hpp"
#include "desired/loadgen/pattern.hpp"
#include "desired/sim/host.hpp"
#include "desired/sim/network.hpp"
#include "desired/telemetry/int_codec.hpp"
#include "desired/transport/tcp.hpp"

using namespace desired;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- 1

double reward_table(double lbo_t, double lbo_t1, double fps_t1) {
  if (lbo_t1 > lbo_t) {
    if (lbo_t1 > 30) return 2;
    if (fps_t1 == 30) return 1;
    if (fps_t1 == 24) return 0.5;
    return 0.1;
  }
  if (lbo_t1 < lbo_t) {
    if (lbo_t1 > 30) return 2;
    if (fps_t1 == 30) return 1;
    if (fps_t1 == 24) return 0.5;
    return -2;
  }
  // Equal buffer levels take the improvement branch.
  return reward_table(lbo_t1 - 1, lbo_t1, fps_t1);
}

Verdict reward_grid() {
  const auto t0 = std::chrono::steady_clock::now();
  int mismatches = 0, cells = 0;
  for (int a = 0; a <= 60; ++a) {
    for (int b = 0; b <= 60; ++b) {
      for (double fps : {18.0, 24.0, 30.0}) {
        for (double fps_t : {18.0, 24.0, 30.0}) {
          ++cells;
          if (agent::compute_reward(a, b, fps_t, fps) != reward_table(a, b, fps)) ++mismatches;
        }
      }
    }
  }
  const double dt = seconds_since(t0);
  return {mismatches == 0 && dt < 1.0,
          fmt("%d cells, %d mismatches, %.3f s", cells, mismatches, dt)};
}

// ---------------------------------------------------------------- 2

Verdict ewma_error() {
  const auto t0 = std::chrono::steady_clock::now();
  sim::RngStream rng("accept/ewma", 2);
  double worst = 0.0;
  long steps = 0;
  for (int seq = 0; seq < 100000; ++seq) {
    const auto len = 1 + rng.uniform_int(64);
    const auto scale = 1 + rng.uniform_int(2'000'000);
    sim::Time s = 0;
    double exact = 0.0;
    for (std::uint64_t i = 0; i < len; ++i) {
      const auto y = static_cast<sim::Time>(rng.uniform_int(scale));
      s = aqm::ewma_update(s, y);
      exact = 0.5 * static_cast<double>(y) + 0.5 * exact;
      worst = std::max(worst, std::abs(exact - static_cast<double>(s)));
      ++steps;
    }
  }
  const double dt = seconds_since(t0);
  return {worst < 1.0 && dt < 5.0,
          fmt("%ld steps, max |err| %.9f us, %.2f s", steps, worst, dt)};
}

// ---------------------------------------------------------------- 3

Verdict red_ramp() {
  bool ok = true;
  double worst_mid = 0.0;
  long points = 0;
  for (int ms : {5, 20, 37, 50, 70, 100}) {
    const auto st = aqm::AqmState::make(aqm::AqmMode::kFixed, sim::milliseconds(ms), 1);
    const sim::Time lo = st.min_th(), hi = st.max_th();
    ok = ok && aqm::red_probability(lo - 1, st) == 0.0 && aqm::red_probability(0, st) == 0.0;
    ok = ok && aqm::red_probability(hi, st) == 1.0 && aqm::red_probability(hi + 1, st) == 1.0;
    const double mid = aqm::red_probability((lo + hi) / 2, st);
    worst_mid = std::max(worst_mid, std::abs(mid - st.max_p / 2));
    double prev = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const sim::Time avg = 2 * hi * i / 10000;
      const double p = aqm::red_probability(avg, st);
      ok = ok && p >= prev && p >= 0.0 && p <= 1.0;
      if (avg < lo) ok = ok && p == 0.0;
      prev = p;
      ++points;
    }
  }
  return {ok && worst_mid <= 1e-12,
          fmt("6 targets, %ld sweep points, midpoint err %.3g", points, worst_mid)};
}

// ---------------------------------------------------------------- 4

class TapSwitch : public aqm::Switch {
 public:
  TapSwitch(sim::Simulator& s, sim::NodeId id, std::string name, aqm::SwitchConfig cfg)
      : Switch(s, id, std::move(name), cfg) {}
  void receive(sim::Packet pkt, sim::PortIndex in_port) override {
    arrivals.emplace_back(sim().now(), pkt.uid);
    Switch::receive(std::move(pkt), in_port);
  }
  std::vector<std::pair<sim::Time, std::uint64_t>> arrivals;
};

class Sink : public sim::Node {
 public:
  using Node::Node;
  void receive(sim::Packet pkt, sim::PortIndex) override { got.insert(pkt.uid); }
  std::set<std::uint64_t> got;
};

Verdict future_drop() {
  // Pure pipeline script.
  auto st = aqm::AqmState::make(aqm::AqmMode::kFixed, sim::milliseconds(5), 2);
  st.ports[0].avg_delay = sim::milliseconds(50);
  sim::RngStream rng("accept/drop", 4);
  bool ok = true;
  const auto trig = aqm::egress_decide(aqm::QueueSample{sim::milliseconds(50), 0, 0, 0}, st,
                                       aqm::PacketView{false, false}, rng);
  ok = ok && trig.decision == aqm::Decision::kNotifyDrop;  // the packet itself leaves
  ok = ok && !st.ports[0].drop_flag;
  ok = ok && aqm::ingress_check(aqm::PacketView{false, true}, 0, st) == aqm::IngressVerdict::kConsumed;
  ok = ok && st.ports[0].drop_flag;
  ok = ok && aqm::ingress_check(aqm::PacketView{}, 1, st) == aqm::IngressVerdict::kForward;
  ok = ok && aqm::ingress_check(aqm::PacketView{}, 0, st) == aqm::IngressVerdict::kDrop;
  ok = ok && !st.ports[0].drop_flag;
  ok = ok && aqm::ingress_check(aqm::PacketView{}, 0, st) == aqm::IngressVerdict::kForward;
  const bool script_ok = ok;

  // Switch-level script: a paced stream into a slow port.
  sim::Simulator s(9);
  sim::Network net(s);
  auto& src = net.add_node<sim::Host>("src");
  aqm::SwitchConfig cfg;
  cfg.target_delay = sim::milliseconds(5);
  auto& sw = net.add_node<TapSwitch>("sw", cfg);
  auto& dst = net.add_node<Sink>("dst");
  net.connect(src, sw, 100'000'000, 0, 1500, 50'000'000, 50'000'000);
  net.connect(sw, dst, 1'000'000, 0, 1500, 50'000'000, 50'000'000);
  net.compute_routes();
  std::vector<aqm::AqmTraceRow> trace;
  sw.set_trace([&](const aqm::AqmTraceRow& r) { trace.push_back(r); });
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    s.schedule(static_cast<sim::Time>(i) * 7000, [&src, &dst, i] {
      sim::Packet p;
      p.dst = dst.id();
      p.seq = i;
      p.size_bytes = 1500;
      src.send(p);
    });
  }
  s.run_until(sim::seconds(60));

  std::set<std::uint64_t> sent;
  for (const auto& [t, uid] : sw.arrivals) sent.insert(uid);
  std::set<std::uint64_t> dropped;
  std::set_difference(sent.begin(), sent.end(), dst.got.begin(), dst.got.end(),
                      std::inserter(dropped, dropped.begin()));
  // Expected: for each notify at time t, the first arrival at or after
  // t + latency is dropped; notifies landing before the same arrival merge.
  std::set<std::uint64_t> expected;
  std::size_t notifies = 0;
  bool triggers_forwarded = true;
  for (const auto& r : trace) {
    if (r.decision != aqm::Decision::kNotifyDrop) continue;
    ++notifies;
    triggers_forwarded = triggers_forwarded && dst.got.count(r.uid) == 1;
    const sim::Time armed = r.time + cfg.recirculation_latency;
    const auto it = std::lower_bound(
        sw.arrivals.begin(), sw.arrivals.end(), armed,
        [](const std::pair<sim::Time, std::uint64_t>& a, sim::Time t) { return a.first < t; });
    if (it != sw.arrivals.end()) expected.insert(it->second);
  }
  const bool switch_ok = notifies > 0 && triggers_forwarded && dropped == expected &&
                         sw.stats().tail_drops == 0 && sw.stats().flag_drops == dropped.size();
  return {script_ok && switch_ok,
          fmt("script %s; switch: %zu notifies, %zu drops, %zu expected, triggers forwarded %s",
              script_ok ? "ok" : "MISMATCH", notifies, dropped.size(), expected.size(),
              triggers_forwarded ? "yes" : "no")};
}

// ---------------------------------------------------------------- 5

telemetry::IntRecord random_record(sim::RngStream& rng) {
  auto bits = [&](unsigned w) { return rng.next_u64() & ((1ULL << w) - 1); };
  telemetry::IntRecord r;
  r.switch_id = static_cast<std::uint32_t>(bits(31));
  r.ingress_port = static_cast<std::uint16_t>(bits(9));
  r.egress_port = static_cast<std::uint16_t>(bits(9));
  r.egress_spec = static_cast<std::uint16_t>(bits(9));
  r.ingress_global_ts = bits(48);
  r.egress_global_ts = bits(48);
  r.enq_timestamp = static_cast<std::uint32_t>(bits(32));
  r.enq_qdepth = static_cast<std::uint32_t>(bits(19));
  r.deq_timedelta = static_cast<std::uint32_t>(bits(32));
  r.deq_qdepth = static_cast<std::uint32_t>(bits(19));
  return r;
}

Verdict int_codec() {
  sim::RngStream rng("accept/int", 5);
  int failures = 0;
  telemetry::IntRecord maxed;
  maxed.switch_id = (1u << 31) - 1;
  maxed.ingress_port = maxed.egress_port = maxed.egress_spec = 511;
  maxed.ingress_global_ts = maxed.egress_global_ts = (1ULL << 48) - 1;
  maxed.enq_timestamp = maxed.deq_timedelta = 0xffffffffu;
  maxed.enq_qdepth = maxed.deq_qdepth = (1u << 19) - 1;
  for (int i = 0; i < 10000; ++i) {
    const auto r = i % 100 == 0 ? maxed : random_record(rng);
    const std::vector<telemetry::IntRecord> one{r};
    const auto bytes = telemetry::encode_int(one);
    if (bytes.size() != telemetry::kIntRecordBytes || bytes.size() != 32) ++failures;
    if (telemetry::decode_int(bytes) != one) ++failures;
  }
  return {failures == 0, fmt("10000 records (100 max-width), %d failures", failures)};
}

// ---------------------------------------------------------------- 6

Verdict gradient_check() {
  sim::RngStream rng("accept/grad", 6);
  const double h = 1e-5;
  double worst = 0.0;
  std::size_t checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<std::size_t> sizes =
        trial == 0 ? std::vector<std::size_t>{19, 24, 24, 3}
                   : std::vector<std::size_t>{2 + rng.uniform_int(19), 2 + rng.uniform_int(24),
                                              2 + rng.uniform_int(24), 3};
    auto net = agent::QNetwork::he_uniform(sizes, rng);
    for (auto& p : net.parameters()) p += rng.uniform(-0.05, 0.05);
    const std::size_t batch_n = 1 + rng.uniform_int(32);
    std::vector<std::vector<double>> inputs(batch_n);
    std::vector<agent::FitSample> batch;
    for (auto& in : inputs) {
      in.resize(sizes[0]);
      for (auto& v : in) v = rng.uniform(0, 1);
      batch.push_back(agent::FitSample{in, rng.uniform_int(3), rng.uniform(-2, 2)});
    }
    std::vector<double> grad;
    agent::loss_and_gradient(net, batch, grad);
    auto params = net.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double saved = params[i];
      params[i] = saved + h;
      const double up = agent::loss_only(net, batch);
      params[i] = saved - h;
      const double down = agent::loss_only(net, batch);
      params[i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double scale = std::max(std::abs(numeric), std::abs(grad[i]));
      // Exact zeros (dead ReLU paths) compare absolutely.
      const double err = scale < 1e-8 ? std::abs(numeric - grad[i]) : std::abs(numeric - grad[i]) / scale;
      worst = std::max(worst, err);
      ++checked;
    }
  }
  return {worst <= 1e-4, fmt("20 instances, %zu parameters, max rel err %.3g", checked, worst)};
}

// ---------------------------------------------------------------- 7

Verdict target_discipline() {
  agent::AgentConfig cfg;
  cfg.tau = 100;
  cfg.min_fill = 100;
  sim::RngStream init("accept/init", 7), act("accept/act", 7), smp("accept/smp", 7), frames("f", 7);
  agent::DqnAgent a(cfg, init, act, smp);
  agent::QNetwork snapshot = a.target();
  bool before_fill = false, sync_exact = true, stale = true;
  std::int64_t syncs_seen = 0;
  a.set_update_observer([&](const agent::DqnAgent& ag) {
    if (ag.replay().size() < 100) before_fill = true;
    if (ag.updates_done() % 100 == 0) {
      sync_exact = sync_exact && ag.target() == ag.online();
      snapshot = ag.target();
      ++syncs_seen;
    } else {
      stale = stale && ag.target() == snapshot && !(ag.target() == ag.online());
    }
  });
  sim::Time target = sim::milliseconds(20);
  std::int64_t first_update_fill = -1;
  for (int w = 1; w <= 2 * 450 + 1; ++w) {
    telemetry::ObservationFrame f;
    for (auto& v : f.features) v = frames.uniform(0, 1);
    const auto before = a.updates_done();
    target = a.control_loop_step(f, agent::AppMetrics{frames.uniform(0, 60), 24}, target);
    if (before == 0 && a.updates_done() == 1) first_update_fill = static_cast<std::int64_t>(a.replay().size());
  }
  const bool ok = !before_fill && sync_exact && stale && syncs_seen == 3 && first_update_fill == 100 &&
                  a.updates_done() == 351;
  return {ok, fmt("%lld updates, %lld syncs, first update at fill %lld, exact %s, stale %s",
                  static_cast<long long>(a.updates_done()), static_cast<long long>(syncs_seen),
                  static_cast<long long>(first_update_fill), sync_exact ? "yes" : "no",
                  stale ? "yes" : "no")};
}

// ---------------------------------------------------------------- 8

Verdict action_clamps() {
  sim::RngStream rng("accept/clamp", 8);
  bool ok = true;
  long steps = 0;
  for (int seq = 0; seq < 1000; ++seq) {
    long t_us = 20000 + static_cast<long>(rng.uniform_int(50001));
    sim::Time t = t_us;
    for (int i = 0; i < 500; ++i) {
      const auto a = static_cast<std::uint8_t>(rng.uniform_int(3));
      if (a == 0) t_us = std::min(70000L, t_us + 2000);
      if (a == 1) t_us = std::max(20000L, t_us - 1000);
      t = agent::apply_action(a, t);
      ok = ok && t == t_us && t >= sim::milliseconds(20) && t <= sim::milliseconds(70);
      ++steps;
    }
  }
  return {ok, fmt("%ld random steps against the scalar oracle", steps)};
}

// ---------------------------------------------------------------- 9

Verdict load_patterns() {
  bool ok = true;
  for (auto [name, n] : {std::pair{"low", 10}, std::pair{"high", 40}}) {
    auto cfg = experiment::make_config("ired-20", name, "full");
    for (int t = 0; t <= 3600; ++t) ok = ok && loadgen::instances_at(t, cfg.load) == n;
    // The running orchestrator, not just the formula.
    experiment::set_duration(cfg, 30, false);
    cfg.load = experiment::make_config("ired-20", name, "desk").load;
    cfg.load.duration_s = 30;
    const auto r = experiment::run_scenario(cfg);
    ok = ok && r.load_trace.size() == 30;
    for (const auto& row : r.load_trace) ok = ok && row.instances == n;
  }
  int lo = 1 << 20, hi = -1;
  for (const char* preset : {"full", "desk"}) {
    const auto cfg = experiment::make_config("desired", "sinusoid", preset);
    for (int t = 0; t <= cfg.duration_s; ++t) {
      const int k = loadgen::instances_at(t, cfg.load);
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
  }
  return {ok && lo == 10 && hi == 40,
          fmt("constant 10/40 exact %s; sinusoid range [%d, %d]", ok ? "yes" : "no", lo, hi)};
}

// ---------------------------------------------------------------- 10-12

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_root() {
  static const fs::path root = [] {
    auto p = fs::temp_directory_path() / "desired-acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

Verdict determinism() {
  bool ok = true;
  double slowest = 0.0;
  std::string worst_arm;
  std::size_t files = 0;
  for (const char* arm : {"desired", "ired-5", "ired-20", "ired-50", "ired-100"}) {
    auto cfg = experiment::make_config(arm, "sinusoid", "desk");
    cfg.seed = 7;
    cfg.aqm_trace = true;
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      const auto dir = scratch_root() / fmt("det-%s-%d", arm, rep);
      cfg.output_dir = dir.string();
      const auto t0 = std::chrono::steady_clock::now();
      experiment::run_experiment(cfg);
      const double dt = seconds_since(t0);
      if (dt > slowest) {
        slowest = dt;
        worst_arm = arm;
      }
      dirs.push_back(dir);
    }
    for (const auto& e : fs::directory_iterator(dirs[0])) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      ok = ok && slurp(e.path()) == slurp(dirs[1] / e.path().filename());
    }
    for (const auto& e : fs::directory_iterator(scratch_root())) {
      // AQM traces are large; drop them once compared.
      if (e.path().filename().string().rfind(fmt("det-%s", arm), 0) == 0) fs::remove_all(e.path());
    }
  }
  return {ok && slowest <= 120.0,
          fmt("5 arms x 2 runs, %zu CSV pairs identical %s, slowest run %.1f s (%s)", files,
              ok ? "yes" : "no", slowest, worst_arm.c_str())};
}

struct SeedRuns {
  std::vector<experiment::RunResult> desired;
  std::vector<dash::PlayerSummary> ired5, ired100;
};

const SeedRuns& seed_runs() {
  static const SeedRuns runs = [] {
    SeedRuns s;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto cfg = experiment::make_config("desired", "sinusoid", "desk");
      cfg.seed = seed;
      s.desired.push_back(experiment::run_scenario(cfg));
      auto base = experiment::make_config("ired-5", "sinusoid", "desk");
      base.seed = seed;
      s.ired5.push_back(experiment::run_scenario(base).player);
      auto big = experiment::make_config("ired-100", "sinusoid", "desk");
      big.seed = seed;
      s.ired100.push_back(experiment::run_scenario(big).player);
    }
    return s;
  }();
  return runs;
}

Verdict learning_signal() {
  const auto& runs = seed_runs();
  int good = 0;
  std::string per;
  for (const auto& r : runs.desired) {
    const auto sig = experiment::learning_signal(r.agent_log, sim::seconds(r.config.duration_s));
    const bool ok = sig.improved() && sig.late_reward > 0;
    good += ok;
    per += fmt(" s%llu:%.3f->%.3f/R%.1f%s", static_cast<unsigned long long>(r.config.seed),
               sig.early_loss, sig.late_loss, sig.late_reward, ok ? "" : "(x)");
  }
  return {good >= 4, fmt("%d/5 seeds;", good) + per};
}

Verdict directional_qos() {
  const auto& runs = seed_runs();
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  std::vector<double> d_reb, d_hi, b_reb, b_hi, c_hi;
  for (const auto& r : runs.desired) {
    d_reb.push_back(r.player.rebuffering_rate_pct);
    d_hi.push_back(r.player.resolution_share_pct[dash::kHighestRep]);
  }
  for (const auto& p : runs.ired5) {
    b_reb.push_back(p.rebuffering_rate_pct);
    b_hi.push_back(p.resolution_share_pct[dash::kHighestRep]);
  }
  for (const auto& p : runs.ired100) c_hi.push_back(p.resolution_share_pct[dash::kHighestRep]);
  const bool ok = mean(d_reb) <= mean(b_reb) && mean(d_hi) >= mean(b_hi);
  return {ok, fmt("rebuffering desired %.2f%% vs ired-5 %.2f%%; 720p share desired %.2f%% vs "
                  "ired-5 %.2f%% (ired-100 %.2f%%, not gated)",
                  mean(d_reb), mean(b_reb), mean(d_hi), mean(b_hi), mean(c_hi))};
}

// ---------------------------------------------------------------- 13

// Zero-capacity-limit pipe with a fixed one-way delay; drops the first
// transmission of the listed segments.
class IdealPipe : public sim::PacketSink {
 public:
  IdealPipe(sim::Simulator& s, sim::NodeId self, sim::Time delay, std::set<std::int64_t> lose)
      : sim_(s), self_(self), delay_(delay), lose_(std::move(lose)) {}
  void send(sim::Packet pkt) override {
    if (pkt.kind == sim::PacketKind::kData && lose_.count(pkt.seq) && seen_.insert(pkt.seq).second) return;
    sim_.schedule_in(delay_, [this, pkt] { deliver(pkt); });
  }
  sim::NodeId address() const override { return self_; }
  std::function<void(const sim::Packet&)> deliver;

 private:
  sim::Simulator& sim_;
  sim::NodeId self_;
  sim::Time delay_;
  std::set<std::int64_t> lose_;
  std::set<std::int64_t> seen_;
};

struct RenoPoint {
  double cwnd;
  double ssthresh;
  bool recovery;
  bool operator==(const RenoPoint&) const = default;
};

// Reference closed loop: rounds of one RTT; each ACK processed in arrival
// order sends segments that are ACKed one round later, in send order.
std::vector<RenoPoint> reference_reno(std::int64_t total, std::set<std::int64_t> lose,
                                      const transport::TcpConfig& c) {
  double cwnd = c.initial_cwnd, ssthresh = c.initial_ssthresh;
  std::int64_t una = 0, nxt = 0, recover = -1;
  int dups = 0;
  bool recovery = false;
  std::set<std::int64_t> dropped_once;
  std::int64_t rcv_nxt = 0;
  std::set<std::int64_t> ooo;
  std::vector<RenoPoint> trace;

  std::vector<std::int64_t> in_flight;  // segments sent this round
  auto send = [&](std::int64_t seg) {
    if (lose.count(seg) && dropped_once.insert(seg).second) return;
    in_flight.push_back(seg);
  };
  auto fill = [&] {
    while (static_cast<std::int64_t>(std::floor(cwnd)) - (nxt - una) > 0 && nxt < total) send(nxt++);
  };
  fill();
  while (una < total) {
    std::vector<std::int64_t> acks;
    for (auto seg : in_flight) {
      if (seg == rcv_nxt) {
        ++rcv_nxt;
        while (ooo.erase(rcv_nxt)) ++rcv_nxt;
      } else if (seg > rcv_nxt) {
        ooo.insert(seg);
      }
      acks.push_back(rcv_nxt);
    }
    in_flight.clear();
    if (acks.empty()) break;  // would need a timeout; not part of this script
    for (auto ack : acks) {
      std::int64_t rexmit = -1;
      if (ack > una) {
        const auto newly = ack - una;
        una = ack;
        dups = 0;
        if (recovery) {
          if (ack > recover) {
            cwnd = ssthresh;
            recovery = false;
          } else {
            rexmit = una;
            cwnd = std::max(cwnd - static_cast<double>(newly) + 1.0, 1.0);
          }
        } else if (cwnd < ssthresh) {
          cwnd += 1.0;
        } else {
          cwnd += 1.0 / cwnd;
        }
      } else if (nxt - una > 0) {
        ++dups;
        if (recovery) {
          cwnd += 1.0;
        } else if (dups == 3 && ack > recover) {
          ssthresh = std::max(cwnd / 2.0, 2.0);
          cwnd = ssthresh + 3.0;
          recovery = true;
          recover = nxt - 1;
          rexmit = una;
        }
      }
      if (rexmit >= 0) send(rexmit);
      fill();
      trace.push_back({cwnd, ssthresh, recovery});
    }
  }
  return trace;
}

Verdict new_reno_trace() {
  const std::int64_t total = 200;
  const std::set<std::int64_t> lose{50, 120};
  transport::TcpConfig cfg;
  sim::Simulator s(13);
  IdealPipe a_side(s, 0, sim::milliseconds(5), lose);
  IdealPipe b_side(s, 1, sim::milliseconds(5), {});
  transport::TcpSender sender(s, a_side, 1, 1, cfg);
  transport::TcpReceiver receiver(b_side, 1, 0, cfg);
  a_side.deliver = [&](const sim::Packet& p) { receiver.on_data_packet(p); };
  b_side.deliver = [&](const sim::Packet& p) { sender.on_ack_packet(p); };
  std::vector<RenoPoint> got;
  sender.set_cwnd_observer([&](const transport::Connection& c) {
    got.push_back({c.cwnd, c.ssthresh, c.state == transport::CcState::kFastRecovery});
  });
  sender.add_data(total);
  s.run_until(sim::seconds(30));
  const auto want = reference_reno(total, lose, cfg);

  // Hand checkpoints: loss of 50 is seen at cwnd 60 after three rounds of
  // slow start (10 -> 20 -> 40 -> 60); ssthresh 30, inflated window 33;
  // the full ACK for everything up to 109 deflates to exactly 30.
  bool hand = true;
  std::size_t entries = 0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const bool entered = got[i].recovery && (i == 0 || !got[i - 1].recovery);
    const bool exited = !got[i].recovery && i > 0 && got[i - 1].recovery;
    if (entered) {
      ++entries;
      if (entries == 1) hand = hand && i > 0 && got[i - 1].cwnd == 60.0 && got[i].ssthresh == 30.0 && got[i].cwnd == 33.0;
    }
    if (exited && entries == 1) hand = hand && got[i].cwnd == 30.0;
  }
  const bool ok = got == want && hand && entries == 2 && sender.timeouts() == 0 &&
                  receiver.rcv_nxt() == total && sender.retransmissions() == 2;
  return {ok, fmt("%zu ACK points vs %zu reference, equal %s, hand checkpoints %s, %zu recoveries, "
                  "%llu timeouts",
                  got.size(), want.size(), got == want ? "yes" : "no", hand ? "ok" : "MISMATCH", entries,
                  static_cast<unsigned long long>(sender.timeouts()))};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "reward-oracle-grid", reward_grid},
      {2, "integer-ewma-error", ewma_error},
      {3, "red-ramp", red_ramp},
      {4, "future-packet-drop", future_drop},
      {5, "int-codec-roundtrip", int_codec},
      {6, "dqn-gradient-check", gradient_check},
      {7, "target-network-discipline", target_discipline},
      {8, "action-clamps", action_clamps},
      {9, "load-patterns", load_patterns},
      {10, "determinism-and-runtime", determinism},
      {11, "learning-signal", learning_signal},
      {12, "directional-qos", directional_qos},
      {13, "new-reno-trace", new_reno_trace},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && only.count(c.id) == 0) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("[%s] %2d %-26s %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
