#include "desired/experiment/compare.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "desired/agent/snapshot.hpp"
#include "desired/experiment/artifacts.hpp"

namespace desired::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

RunRecord record_from_summary(const json& s, const std::string& dir) {
  try {
    if (s.at("schema").get<std::string>() != kSummarySchema) {
      throw CompareError(dir + ": unsupported summary schema " + s.at("schema").dump());
    }
    RunRecord r;
    r.dir = dir;
    r.scenario = s.at("scenario").get<std::string>();
    r.seed = s.at("seed").get<std::uint64_t>();
    const auto& p = s.at("player");
    const auto& shares = p.at("resolution_share_pct");
    r.values[0] = p.at("rebuffering_rate_pct").get<double>();
    r.values[1] = shares.at("426x240").get<double>();
    r.values[2] = shares.at("854x480").get<double>();
    r.values[3] = shares.at("1280x720").get<double>();
    r.values[4] = p.at("mean_fps").get<double>();
    r.values[5] = p.at("mean_lbo").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw CompareError(dir + ": malformed summary (" + std::string(e.what()) + ")");
  }
}

RunRecord read_run(const std::string& dir) {
  const fs::path path = fs::path(dir) / kSummaryJson;
  std::ifstream in(path);
  if (!in) throw CompareError("missing " + path.string());
  json s;
  try {
    s = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CompareError(path.string() + ": " + e.what());
  }
  return record_from_summary(s, dir);
}

CompareTable compare_records(std::vector<RunRecord> runs, const std::string& baseline) {
  if (runs.size() < 2) throw CompareError("compare needs at least two runs");
  CompareTable t;
  std::map<std::string, std::size_t> index;
  for (const auto& r : runs) {
    if (index.emplace(r.scenario, t.arms.size()).second) {
      ArmStats a;
      a.scenario = r.scenario;
      t.arms.push_back(a);
    }
  }
  constexpr std::size_t m = kCompareMetrics.size();
  for (const auto& r : runs) {
    auto& a = t.arms[index.at(r.scenario)];
    ++a.runs;
    for (std::size_t k = 0; k < m; ++k) a.mean[k] += r.values[k];
  }
  for (auto& a : t.arms) {
    for (std::size_t k = 0; k < m; ++k) a.mean[k] /= static_cast<double>(a.runs);
  }
  for (const auto& r : runs) {
    auto& a = t.arms[index.at(r.scenario)];
    for (std::size_t k = 0; k < m; ++k) {
      const double d = r.values[k] - a.mean[k];
      a.sd[k] += d * d;
    }
  }
  for (auto& a : t.arms) {
    for (std::size_t k = 0; k < m; ++k) {
      a.sd[k] = a.runs > 1 ? std::sqrt(a.sd[k] / static_cast<double>(a.runs - 1)) : 0.0;
    }
  }
  t.baseline = baseline.empty() ? t.arms.front().scenario : baseline;
  auto bit = index.find(t.baseline);
  if (bit == index.end()) throw CompareError("baseline arm \"" + t.baseline + "\" not among inputs");
  const auto base = t.arms[bit->second].mean;
  for (auto& a : t.arms) {
    for (std::size_t k = 0; k < m; ++k) {
      if (base[k] != 0.0) {
        a.ratio[k] = a.mean[k] / base[k];
      } else if (a.mean[k] == 0.0) {
        a.ratio[k] = 1.0;
      }
    }
  }
  t.runs = std::move(runs);
  return t;
}

CompareTable compare(const std::vector<std::string>& dirs, const std::string& baseline) {
  if (dirs.size() < 2) throw CompareError("compare needs at least two artifact directories");
  std::vector<RunRecord> runs;
  for (const auto& d : dirs) runs.push_back(read_run(d));
  return compare_records(std::move(runs), baseline);
}

namespace {

std::string fixed(double v, int prec = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

}  // namespace

void write_compare_text(std::ostream& out, const CompareTable& t) {
  out << "per-run\n";
  for (const auto& r : t.runs) {
    out << "  " << r.scenario << " seed=" << r.seed;
    for (std::size_t k = 0; k < kCompareMetrics.size(); ++k) {
      out << ' ' << kCompareMetrics[k] << '=' << fixed(r.values[k]);
    }
    out << "  (" << r.dir << ")\n";
  }
  out << "per-arm mean +- sd (baseline " << t.baseline << ")\n";
  for (const auto& a : t.arms) {
    out << "  " << a.scenario << " n=" << a.runs << '\n';
    for (std::size_t k = 0; k < kCompareMetrics.size(); ++k) {
      out << "    " << kCompareMetrics[k] << ": " << fixed(a.mean[k]) << " +- " << fixed(a.sd[k])
          << "  ratio " << (a.ratio[k] ? fixed(*a.ratio[k]) : std::string("n/a")) << '\n';
    }
  }
}

void write_compare_csv(std::ostream& out, const CompareTable& t) {
  out << "scenario,runs";
  for (const char* name : kCompareMetrics) {
    out << ',' << name << "_mean," << name << "_sd," << name << "_ratio";
  }
  out << '\n';
  for (const auto& a : t.arms) {
    out << a.scenario << ',' << a.runs;
    for (std::size_t k = 0; k < kCompareMetrics.size(); ++k) {
      out << ',' << format_double(a.mean[k]) << ',' << format_double(a.sd[k]) << ','
          << (a.ratio[k] ? format_double(*a.ratio[k]) : "");
    }
    out << '\n';
  }
}

BatchResult run_batch(const ExperimentConfig& base, const std::vector<std::uint64_t>& seeds,
                      const std::string& out_root, double alpha) {
  if (base.mode != aqm::AqmMode::kDynamic) throw ConfigError("batch requires dynamic mode");
  if (seeds.empty()) throw ConfigError("batch needs at least one seed");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("ensemble alpha must be in [0, 1]");
  // Reject the whole batch before running anything.
  for (auto s : seeds) {
    ExperimentConfig c = base;
    c.seed = s;
    validate(c);
  }
  BatchResult res;
  std::optional<agent::QNetwork> avg;
  for (auto s : seeds) {
    ExperimentConfig c = base;
    c.seed = s;
    c.output_dir = (fs::path(out_root) / ("seed-" + std::to_string(s))).string();
    const RunResult r = run_experiment(c);
    res.run_dirs.push_back(c.output_dir);
    if (!avg) {
      avg = *r.final_network;
    } else {
      avg = agent::ensemble_average(*avg, *r.final_network, alpha);
    }
  }
  fs::create_directories(out_root);
  res.ensemble_path = (fs::path(out_root) / "ensemble.qnet").string();
  agent::save_snapshot(res.ensemble_path, *avg);
  return res;
}

}  // namespace desired::experiment
