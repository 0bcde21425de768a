#include <doctest.h>

#include "desired/aqm/aqm.hpp"
#include "desired/aqm/switch.hpp"
#include "desired/sim/host.hpp"
#include "support.hpp"

using namespace desired;
using namespace desired::aqm;
using sim::milliseconds;

TEST_CASE("ewma shift examples") {
  CHECK(ewma_update(10000, 20000) == 15000);
  CHECK(ewma_update(0, 0) == 0);
  CHECK(ewma_update(7, 8) == 7);
}

TEST_CASE("integer EWMA tracks the real EWMA within 1 us") {
  sim::RngStream rng("ewma", 1);
  for (int seq = 0; seq < 200; ++seq) {
    Time s = 0;
    double exact = 0.0;
    for (int i = 0; i < 500; ++i) {
      const auto y = static_cast<Time>(rng.uniform_int(200'000));
      s = ewma_update(s, y);
      exact = 0.5 * static_cast<double>(y) + 0.5 * exact;
      REQUIRE(std::abs(exact - static_cast<double>(s)) < 1.0);
    }
  }
}

TEST_CASE("red ramp examples") {
  const auto st = AqmState::make(AqmMode::kFixed, milliseconds(20), 1);
  CHECK(st.min_th() == milliseconds(20));
  CHECK(st.max_th() == milliseconds(40));
  CHECK(red_probability(milliseconds(19), st) == 0.0);
  CHECK(red_probability(milliseconds(30), st) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(red_probability(milliseconds(40), st) == 1.0);
  CHECK(red_probability(milliseconds(41), st) == 1.0);
  CHECK(red_probability(milliseconds(20), st) == 0.0);
}

TEST_CASE("red ramp is monotone and bounded") {
  for (Time target : {milliseconds(5), milliseconds(20), milliseconds(70)}) {
    const auto st = AqmState::make(AqmMode::kFixed, target, 1);
    double prev = 0.0;
    for (Time avg = 0; avg <= 3 * target; avg += target / 97 + 1) {
      const double p = red_probability(avg, st);
      REQUIRE(p >= prev);
      REQUIRE(p >= 0.0);
      REQUIRE(p <= 1.0);
      if (avg < st.max_th()) REQUIRE(p <= st.max_p);
      prev = p;
    }
  }
}

TEST_CASE("square-law coupling") {
  CHECK(coupled_mark_probability(0.04) == doctest::Approx(0.4));
  CHECK(coupled_mark_probability(0.0) == 0.0);
  CHECK(coupled_mark_probability(0.5) == 1.0);
}

TEST_CASE("egress: below min_th passes without drawing") {
  auto st = AqmState::make(AqmMode::kFixed, milliseconds(20), 1);
  sim::RngStream rng("e", 1);
  sim::RngStream untouched("e", 1);
  const auto out = egress_decide(QueueSample{1000, 0, 0, 0}, st, PacketView{}, rng);
  CHECK(out.decision == Decision::kPass);
  CHECK(rng.next_u64() == untouched.next_u64());
}

TEST_CASE("egress: saturated non-ECT packet triggers a notify-drop") {
  auto st = AqmState::make(AqmMode::kFixed, milliseconds(20), 1);
  st.ports[0].avg_delay = milliseconds(100);
  sim::RngStream rng("e", 2);
  const auto out = egress_decide(QueueSample{milliseconds(100), 0, 0, 0}, st, PacketView{false, false}, rng);
  CHECK(out.decision == Decision::kNotifyDrop);
  CHECK(out.probability == 1.0);
}

TEST_CASE("ECT marking frequency follows the coupled probability") {
  // Choose avg so that p = 0.04 exactly: avg = min_th + 0.4 * (max_th - min_th).
  auto st = AqmState::make(AqmMode::kFixed, milliseconds(20), 1);
  const Time avg = milliseconds(20) + milliseconds(8);
  sim::RngStream rng("mark", 3);
  int marks = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    st.ports[0].avg_delay = avg;
    const auto out = egress_decide(QueueSample{avg, 0, 0, 0}, st, PacketView{true, false}, rng);
    REQUIRE(out.probability == doctest::Approx(0.04));
    REQUIRE(out.decision != Decision::kNotifyDrop);
    marks += out.decision == Decision::kMark;
  }
  CHECK(std::abs(marks / static_cast<double>(n) - 0.4) < 0.01);
}

TEST_CASE("ingress flag semantics") {
  auto st = AqmState::make(AqmMode::kFixed, milliseconds(20), 2);
  CHECK(ingress_check(PacketView{}, 0, st) == IngressVerdict::kForward);
  CHECK_FALSE(st.ports[0].drop_flag);
  CHECK(ingress_check(PacketView{false, true}, 0, st) == IngressVerdict::kConsumed);
  CHECK(ingress_check(PacketView{false, true}, 0, st) == IngressVerdict::kConsumed);
  CHECK(ingress_check(PacketView{}, 1, st) == IngressVerdict::kForward);
  CHECK(ingress_check(PacketView{}, 0, st) == IngressVerdict::kDrop);
  CHECK(ingress_check(PacketView{}, 0, st) == IngressVerdict::kForward);
}

TEST_CASE("target delay rules") {
  auto fixed = AqmState::make(AqmMode::kFixed, milliseconds(5), 1);
  CHECK_THROWS(set_target_delay(fixed, milliseconds(20)));
  CHECK(fixed.target_delay == milliseconds(5));
  auto dyn = AqmState::make(AqmMode::kDynamic, milliseconds(20), 1);
  CHECK_THROWS_AS(set_target_delay(dyn, milliseconds(19)), TargetDelayError);
  CHECK_THROWS_AS(set_target_delay(dyn, milliseconds(71)), TargetDelayError);
  set_target_delay(dyn, milliseconds(70));
  CHECK(dyn.max_th() == milliseconds(140));
  CHECK_THROWS(AqmState::make(AqmMode::kDynamic, milliseconds(5), 1));
}

namespace {

struct OneSwitch {
  sim::Simulator sim{3};
  sim::Network net{sim};
  sim::Host* src;
  Switch* sw;
  testsupport::SinkNode* dst;
  testsupport::SinkNode* other;

  explicit OneSwitch(SwitchConfig cfg, std::int64_t out_bps = 1'000'000) {
    src = &net.add_node<sim::Host>("src");
    sw = &net.add_node<Switch>("sw", cfg);
    dst = &net.add_node<testsupport::SinkNode>("dst");
    other = &net.add_node<testsupport::SinkNode>("other");
    net.connect(*src, *sw, 100'000'000, 0, 1500, 10'000'000, 10'000'000);
    net.connect(*sw, *dst, out_bps, 0, 1500, 10'000'000, 10'000'000);
    net.connect(*sw, *other, 100'000'000, 0, 1500, 10'000'000, 10'000'000);
    net.compute_routes();
  }

  void send(sim::NodeId to, std::int64_t seq, std::uint32_t bytes = 1500) {
    sim::Packet p;
    p.dst = to;
    p.seq = seq;
    p.size_bytes = bytes;
    src->send(p);
  }
};

}  // namespace

TEST_CASE("notification sets the flag after the recirculation latency, per port") {
  SwitchConfig cfg;
  cfg.target_delay = milliseconds(5);
  OneSwitch t(cfg);
  const auto out = t.sw->route(t.dst->id());
  t.sw->recirculate_notification(out);
  t.sim.run_until(9);
  CHECK_FALSE(t.sw->aqm().ports[out].drop_flag);
  t.sim.run_until(10);
  CHECK(t.sw->aqm().ports[out].drop_flag);
  CHECK_FALSE(t.sw->aqm().ports[t.sw->route(t.other->id())].drop_flag);
}

TEST_CASE("switch appends INT only to probes and counts their bytes") {
  SwitchConfig cfg;
  cfg.aqm_enabled = false;
  cfg.switch_id = 9;
  OneSwitch t(cfg, 100'000'000);
  sim::Packet pr;
  pr.kind = sim::PacketKind::kProbe;
  pr.dst = t.dst->id();
  pr.size_bytes = 64;
  t.src->send(pr);
  t.send(t.dst->id(), 1, 1000);
  t.sim.run_until(sim::seconds(1));
  REQUIRE(t.dst->arrivals.size() == 2);
  const auto& probe = t.dst->arrivals[0].packet;
  CHECK(probe.size_bytes == 96);
  const auto recs = telemetry::decode_int(probe.telemetry);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].switch_id == 9);
  CHECK(recs[0].egress_global_ts >= recs[0].ingress_global_ts);
  CHECK(t.dst->arrivals[1].packet.telemetry.empty());
  CHECK(t.dst->arrivals[1].packet.size_bytes == 1000);
}

TEST_CASE("hop limit refuses further appends") {
  SwitchConfig cfg;
  cfg.hop_limit = 1;
  cfg.aqm_enabled = false;
  OneSwitch t(cfg, 100'000'000);
  sim::Packet pr;
  pr.kind = sim::PacketKind::kProbe;
  pr.dst = t.dst->id();
  pr.size_bytes = 96;
  pr.telemetry.assign(32, 0);
  t.src->send(pr);
  t.sim.run_until(sim::seconds(1));
  REQUIRE(t.dst->arrivals.size() == 1);
  CHECK(t.dst->arrivals[0].packet.telemetry.size() == 32);
  CHECK(t.sw->stats().hop_limit_refusals == 1);
}

TEST_CASE("congested switch: every notify-drop is followed by exactly one future drop on that port") {
  SwitchConfig cfg;
  cfg.target_delay = milliseconds(5);
  OneSwitch t(cfg);  // 12 ms per 1500 B packet toward dst
  std::vector<AqmTraceRow> trace;
  t.sw->set_trace([&](const AqmTraceRow& r) { trace.push_back(r); });
  for (int i = 0; i < 400; ++i) {
    t.sim.schedule(i * 6000, [&t, i] { t.send(t.dst->id(), i); });
  }
  t.sim.run_until(sim::seconds(10));
  const auto& st = t.sw->stats();
  CHECK(st.notifications > 0);
  // Every notification finds a later arrival before the run ends, and two
  // notifications that land before the next arrival collapse into one drop.
  CHECK(st.flag_drops <= st.notifications);
  CHECK(st.flag_drops > 0);
  CHECK(t.dst->arrivals.size() + st.flag_drops + st.tail_drops == 400);
}

TEST_CASE("apply_target_delay is all-or-nothing") {
  sim::Simulator s;
  SwitchConfig dyn;
  dyn.mode = AqmMode::kDynamic;
  Switch a(s, 0, "a", dyn), b(s, 1, "b", dyn);
  std::vector<Switch*> both{&a, &b};
  apply_target_delay(both, milliseconds(70));
  CHECK(a.config().mode == AqmMode::kDynamic);
  CHECK(a.aqm().target_delay == milliseconds(70));
  CHECK(b.aqm().target_delay == milliseconds(70));
  CHECK_THROWS_AS(apply_target_delay(both, milliseconds(19)), TargetDelayError);
  CHECK(a.aqm().target_delay == milliseconds(70));
  apply_target_delay(both, milliseconds(70));
  CHECK(b.aqm().target_delay == milliseconds(70));

  SwitchConfig fixed;
  Switch c(s, 2, "c", fixed);
  std::vector<Switch*> mixed{&a, &c};
  CHECK_THROWS(apply_target_delay(mixed, milliseconds(30)));
  CHECK(a.aqm().target_delay == milliseconds(70));
  CHECK(c.aqm().target_delay == milliseconds(20));
}
