// desired: run, compare and batch DESiRED / iRED experiments.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "desired/experiment/artifacts.hpp"
#include "desired/experiment/compare.hpp"
#include "desired/experiment/config.hpp"

namespace ex = desired::experiment;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct RunOptions {
  std::string config_path;
  std::string arm;
  std::string load;
  std::string preset = "desk";
  std::string out;
  std::uint64_t seed = 0;
  std::int64_t duration = 0;
  bool aqm_trace = false;
  bool telemetry_dump = false;
  bool quiet = false;
};

void add_run_flags(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON config file; flags override its values");
  cmd->add_option("-a,--arm", o.arm, "ired-5 | ired-20 | ired-50 | ired-100 | desired");
  cmd->add_option("-l,--load", o.load, "low | high | sinusoid");
  cmd->add_option("-p,--preset", o.preset, "desk (600 s) | full (3600 s)");
  cmd->add_option("-s,--seed", o.seed, "master seed");
  cmd->add_option("-d,--duration", o.duration, "run length in seconds");
  cmd->add_option("-o,--out", o.out, "output directory");
  cmd->add_flag("--aqm-trace", o.aqm_trace, "write per-dequeue AQM decisions");
  cmd->add_flag("--telemetry-dump", o.telemetry_dump, "write every decoded probe");
  cmd->add_flag("-q,--quiet", o.quiet, "no progress output");
}

ex::ExperimentConfig resolve(const RunOptions& o) {
  ex::ExperimentConfig cfg = o.config_path.empty()
                                 ? ex::make_config(o.arm.empty() ? "desired" : o.arm,
                                                   o.load.empty() ? "sinusoid" : o.load, o.preset)
                                 : ex::load_config_file(o.config_path);
  if (!o.config_path.empty()) {
    if (!o.arm.empty()) ex::set_arm(cfg, o.arm);
    if (!o.load.empty()) ex::set_load(cfg, o.load);
  }
  if (o.duration > 0) ex::set_duration(cfg, o.duration, true);
  if (o.seed != 0) cfg.seed = o.seed;
  if (o.aqm_trace) cfg.aqm_trace = true;
  if (o.telemetry_dump) cfg.telemetry_dump = true;
  if (!o.out.empty()) {
    cfg.output_dir = o.out;
  } else if (o.config_path.empty()) {
    cfg.output_dir = "out/" + cfg.scenario + "-" + cfg.load_name + "-s" + std::to_string(cfg.seed);
  }
  ex::validate(cfg);
  return cfg;
}

std::vector<std::uint64_t> parse_seeds(const std::string& list) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const auto comma = list.find(',', pos);
    const std::string tok = list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const auto dots = tok.find("..");
    try {
      if (dots != std::string::npos) {
        const auto lo = std::stoull(tok.substr(0, dots));
        const auto hi = std::stoull(tok.substr(dots + 2));
        if (hi < lo) throw ex::ConfigError("bad seed range " + tok);
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      } else {
        seeds.push_back(std::stoull(tok));
      }
    } catch (const std::logic_error&) {
      throw ex::ConfigError("bad seed list \"" + list + "\"");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return seeds;
}

void print_run(const ex::RunResult& r, double wall_s) {
  const auto& p = r.player;
  std::printf("%s load=%s seed=%llu: rebuffering %.2f%%, 720p share %.1f%%, mean fps %.2f, "
              "mean lbo %.1f s, %llu events, %.1f s wall -> %s\n",
              r.config.scenario.c_str(), r.config.load_name.c_str(),
              static_cast<unsigned long long>(r.config.seed), p.rebuffering_rate_pct,
              p.resolution_share_pct[2], p.mean_fps, p.mean_lbo,
              static_cast<unsigned long long>(r.stats.events), wall_s, r.config.output_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DESiRED / iRED AQM experiment simulator"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "run one experiment and write its artifact directory");
  add_run_flags(run, run_opts);

  std::vector<std::string> dirs;
  std::string baseline;
  std::string csv_path;
  auto* cmp = app.add_subcommand("compare", "compare artifact directories");
  cmp->add_option("dirs", dirs, "artifact directories")->required();
  cmp->add_option("-b,--baseline", baseline, "baseline arm for ratios (default: first)");
  cmp->add_option("--csv", csv_path, "also write the per-arm table as CSV");

  RunOptions batch_opts;
  std::string seed_spec = "1..10";
  double alpha = 0.5;
  auto* batch = app.add_subcommand("batch", "run a seed batch and average the agents");
  add_run_flags(batch, batch_opts);
  batch->add_option("--seeds", seed_spec, "seed list, e.g. 1..10 or 1,4,9");
  batch->add_option("--alpha", alpha, "ensemble running-average weight");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      const auto cfg = resolve(run_opts);
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = ex::run_experiment(cfg);
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (!run_opts.quiet) print_run(r, wall);
    } else if (*cmp) {
      const auto table = ex::compare(dirs, baseline);
      ex::write_compare_text(std::cout, table);
      if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error("cannot write " + csv_path);
        ex::write_compare_csv(out, table);
      }
    } else if (*batch) {
      auto cfg = resolve(batch_opts);
      const auto seeds = parse_seeds(seed_spec);
      const std::string root = batch_opts.out.empty() ? "out/batch-" + cfg.scenario : batch_opts.out;
      const auto res = ex::run_batch(cfg, seeds, root, alpha);
      if (!batch_opts.quiet) {
        for (const auto& d : res.run_dirs) std::printf("run %s\n", d.c_str());
        std::printf("ensemble %s\n", res.ensemble_path.c_str());
      }
    }
  } catch (const ex::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const ex::CompareError& e) {
    std::fprintf(stderr, "compare error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
  return kOk;
}
