#include "desired/experiment/artifacts.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "desired/agent/snapshot.hpp"

namespace desired::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

const char* decision_name(aqm::Decision d) {
  switch (d) {
    case aqm::Decision::kPass: return "pass";
    case aqm::Decision::kMark: return "mark";
    case aqm::Decision::kNotifyDrop: return "notify_drop";
  }
  return "?";
}

std::string resolution_of(int rep) {
  if (rep < 0) return "none";
  return dash::kVideoCatalog.at(static_cast<std::size_t>(rep)).resolution();
}

}  // namespace

void write_player_csv(std::ostream& out, const std::vector<dash::MetricRow>& rows) {
  out << "t,fps,lbo,resolution,stalled\n";
  for (const auto& r : rows) {
    out << r.t << ',' << format_double(r.fps) << ',' << format_double(r.lbo) << ','
        << resolution_of(r.rep) << ',' << (r.stalled ? 1 : 0) << '\n';
  }
}

void write_agent_csv(std::ostream& out, const std::vector<agent::AgentLogRow>& rows) {
  out << "window,t,epsilon,action,target_delay_us,reward,loss,replay_fill\n";
  for (const auto& r : rows) {
    out << r.window << ',' << r.t << ',' << format_double(r.epsilon) << ','
        << static_cast<int>(r.action) << ',' << r.target_delay << ','
        << (r.reward ? format_double(*r.reward) : "") << ','
        << (r.loss ? format_double(*r.loss) : "") << ',' << r.replay_fill << '\n';
  }
}

void write_load_csv(std::ostream& out, const std::vector<LoadRow>& rows) {
  out << "t,instances\n";
  for (const auto& r : rows) out << r.t << ',' << r.instances << '\n';
}

void write_observations_csv(std::ostream& out, const std::vector<ObservationRow>& rows) {
  out << "window,t_start,t_end,target_delay_us,record_count";
  for (std::size_t i = 0; i < telemetry::kFeatureCount; ++i) out << ',' << telemetry::feature_name(i);
  out << '\n';
  for (const auto& r : rows) {
    out << r.window << ',' << r.t_start << ',' << r.t_end << ',' << r.target_delay << ','
        << r.record_count;
    for (double f : r.features) out << ',' << format_double(f);
    out << '\n';
  }
}

void write_aqm_trace_csv(std::ostream& out, const std::vector<aqm::AqmTraceRow>& rows) {
  out << "time_us,switch,port,avg_delay_us,p,decision,uid\n";
  for (const auto& r : rows) {
    out << r.time << ',' << r.switch_id << ',' << r.port << ',' << r.avg_delay << ','
        << format_double(r.probability) << ',' << decision_name(r.decision) << ',' << r.uid
        << '\n';
  }
}

void write_telemetry_csv(std::ostream& out, const std::vector<telemetry::CollectedProbe>& probes) {
  std::size_t hops = 0;
  for (const auto& p : probes) hops = std::max(hops, p.records.size());
  out << "seq,sent_at_us,received_at_us,hops";
  for (std::size_t h = 0; h < hops; ++h) {
    for (const auto& f : telemetry::kIntLayout) out << ",h" << h << '_' << f.name;
  }
  out << '\n';
  for (const auto& p : probes) {
    out << p.seq << ',' << p.sent_at << ',' << p.received_at << ',' << p.records.size();
    for (std::size_t h = 0; h < hops; ++h) {
      if (h < p.records.size()) {
        for (auto v : telemetry::field_values(p.records[h])) out << ',' << v;
      } else {
        for (std::size_t k = 0; k < telemetry::kIntLayout.size(); ++k) out << ',';
      }
    }
    out << '\n';
  }
}

json summary_json(const RunResult& r) {
  const auto& c = r.config;
  const auto& p = r.player;
  json shares = json::object();
  for (std::size_t i = 0; i < dash::kVideoCatalog.size(); ++i) {
    shares[dash::kVideoCatalog[i].resolution()] = p.resolution_share_pct[i];
  }
  json switches = json::array();
  for (const auto& s : r.stats.switches) {
    switches.push_back({{"switch_id", s.switch_id},
                        {"received", s.stats.received},
                        {"flag_drops", s.stats.flag_drops},
                        {"notifications", s.stats.notifications},
                        {"marks", s.stats.marks},
                        {"tail_drops", s.tail_drops},
                        {"max_depth_bytes", s.max_depth_bytes},
                        {"int_appends", s.stats.int_appends}});
  }
  json j{
      {"schema", kSummarySchema},
      {"scenario", c.scenario},
      {"mode", to_string(c.mode)},
      {"load", c.load_name},
      {"seed", c.seed},
      {"duration_s", c.duration_s},
      {"player",
       {{"seconds", p.seconds},
        {"stalled_seconds", p.stalled_seconds},
        {"played_seconds", p.played_seconds},
        {"rebuffering_rate_pct", p.rebuffering_rate_pct},
        {"resolution_share_pct", shares},
        {"mean_fps", p.mean_fps},
        {"mean_lbo", p.mean_lbo},
        {"segments", r.stats.video_segments},
        {"request_retries", r.stats.video_request_retries}}},
      {"network",
       {{"events", r.stats.events},
        {"probes_sent", r.stats.probes_sent},
        {"probes_received", r.stats.probes_received},
        {"load_clients_started", r.stats.load_clients_started},
        {"bottleneck_tx_bytes", r.stats.bottleneck_tx_bytes},
        {"switches", switches}}},
  };
  if (!r.agent_log.empty()) {
    const auto ls = learning_signal(r.agent_log, sim::seconds(c.duration_s));
    const auto& last = r.agent_log.back();
    double target_sum = 0.0;
    for (const auto& row : r.agent_log) target_sum += static_cast<double>(row.target_delay);
    j["agent"] = {
        {"windows", r.agent_log.size()},
        {"replay_fill", last.replay_fill},
        {"final_epsilon", last.epsilon},
        {"final_target_delay_us", last.target_delay},
        {"mean_target_delay_us", target_sum / static_cast<double>(r.agent_log.size())},
        {"early_loss", ls.early_loss},
        {"late_loss", ls.late_loss},
        {"early_updates", ls.early_updates},
        {"late_updates", ls.late_updates},
        {"late_reward", ls.late_reward},
    };
  }
  return j;
}

namespace {

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn, std::vector<std::string>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
  written.push_back(path.string());
}

}  // namespace

std::vector<std::string> write_artifacts(const RunResult& r, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root);
  std::vector<std::string> written;
  write_file(root / kPlayerCsv, [&](std::ostream& o) { write_player_csv(o, r.player_log); }, written);
  write_file(root / kLoadCsv, [&](std::ostream& o) { write_load_csv(o, r.load_trace); }, written);
  write_file(root / kObservationsCsv,
             [&](std::ostream& o) { write_observations_csv(o, r.observations); }, written);
  if (r.config.mode == aqm::AqmMode::kDynamic) {
    write_file(root / kAgentCsv, [&](std::ostream& o) { write_agent_csv(o, r.agent_log); }, written);
  } else {
    fs::remove(root / kAgentCsv);
  }
  if (r.config.aqm_trace) {
    write_file(root / kAqmTraceCsv, [&](std::ostream& o) { write_aqm_trace_csv(o, r.aqm_trace); },
               written);
  }
  if (r.config.telemetry_dump) {
    write_file(root / kTelemetryCsv, [&](std::ostream& o) { write_telemetry_csv(o, r.probes); },
               written);
  }
  if (r.final_network) {
    write_file(root / kSnapshotFile,
               [&](std::ostream& o) { agent::write_snapshot(o, *r.final_network); }, written);
  }
  write_file(root / kSummaryJson, [&](std::ostream& o) { o << summary_json(r).dump(2) << '\n'; },
             written);
  write_file(root / kConfigJson, [&](std::ostream& o) { o << to_json(r.config).dump(2) << '\n'; },
             written);
  return written;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult r = run_scenario(cfg);
  write_artifacts(r, cfg.output_dir);
  return r;
}

}  // namespace desired::experiment
