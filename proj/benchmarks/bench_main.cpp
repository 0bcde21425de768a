#include <benchmark/benchmark.h>

#include "desired/agent/dqn.hpp"
#include "desired/aqm/aqm.hpp"
#include "desired/experiment/config.hpp"
#include "desired/experiment/scenario.hpp"
#include "desired/sim/engine.hpp"
#include "desired/telemetry/int_codec.hpp"

using namespace desired;

static void BM_EngineDispatch(benchmark::State& state) {
  for (auto _ : state) {
    sim::Simulator s(1);
    std::int64_t hits = 0;
    for (int i = 0; i < 100000; ++i) s.schedule((i * 7919) % 100003, [&hits] { ++hits; });
    s.run_until(200000);
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_EngineDispatch)->Unit(benchmark::kMillisecond);

static void BM_EgressDecide(benchmark::State& state) {
  auto st = aqm::AqmState::make(aqm::AqmMode::kFixed, sim::milliseconds(20), 1);
  sim::RngStream rng("bench", 1);
  sim::Time d = 0;
  for (auto _ : state) {
    d = (d + 3001) % sim::milliseconds(60);
    auto out = aqm::egress_decide(aqm::QueueSample{d, 10, 9, 0}, st, aqm::PacketView{true, false}, rng);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_EgressDecide);

static void BM_IntEncodeDecode(benchmark::State& state) {
  std::vector<telemetry::IntRecord> recs(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < recs.size(); ++i) {
    recs[i].switch_id = static_cast<std::uint32_t>(i + 1);
    recs[i].deq_timedelta = 12345;
    recs[i].egress_global_ts = 987654321;
  }
  for (auto _ : state) {
    auto bytes = telemetry::encode_int(recs);
    auto back = telemetry::decode_int(bytes);
    benchmark::DoNotOptimize(back);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IntEncodeDecode)->Arg(1)->Arg(2)->Arg(8);

static void BM_QForward(benchmark::State& state) {
  sim::RngStream rng("bench", 2);
  const auto net = agent::QNetwork::he_uniform({19, 24, 24, 3}, rng);
  std::vector<double> x(19, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
}
BENCHMARK(BM_QForward);

static void BM_TrainStep(benchmark::State& state) {
  sim::RngStream rng("bench", 3);
  auto online = agent::QNetwork::he_uniform({19, 24, 24, 3}, rng);
  const auto target = online;
  std::vector<agent::Transition> ts(32);
  for (auto& t : ts) {
    for (auto& v : t.state) v = rng.uniform();
    for (auto& v : t.next_state) v = rng.uniform();
    t.action = static_cast<std::uint8_t>(rng.uniform_int(3));
    t.reward = 0.5;
  }
  std::vector<const agent::Transition*> batch;
  for (auto& t : ts) batch.push_back(&t);
  agent::NesterovSgd opt(1e-3, 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(agent::train_step(online, target, batch, 0.99, opt));
}
BENCHMARK(BM_TrainStep);

static void BM_ScenarioMinute(benchmark::State& state) {
  auto cfg = experiment::make_config("desired", "low", "desk");
  experiment::set_duration(cfg, 60, true);
  cfg.load.duration_s = 60;
  for (auto _ : state) {
    const auto r = experiment::run_scenario(cfg);
    benchmark::DoNotOptimize(r.stats.events);
    state.counters["events"] = static_cast<double>(r.stats.events);
  }
}
BENCHMARK(BM_ScenarioMinute)->Unit(benchmark::kMillisecond)->Iterations(3);
BENCHMARK_MAIN();
