#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "desired/experiment/config.hpp"

namespace desired::experiment {

class CompareError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Metric columns of the comparison table.
inline constexpr std::array<const char*, 6> kCompareMetrics{
    "rebuffering_rate_pct", "share_426x240", "share_854x480",
    "share_1280x720",       "mean_fps",      "mean_lbo"};

struct RunRecord {
  std::string dir;
  std::string scenario;
  std::uint64_t seed = 0;
  std::array<double, kCompareMetrics.size()> values{};
};

struct ArmStats {
  std::string scenario;
  std::size_t runs = 0;
  std::array<double, kCompareMetrics.size()> mean{};
  std::array<double, kCompareMetrics.size()> sd{};  // sample stddev, 0 for one run
  // arm mean / baseline mean; empty when undefined (0/0 is reported as 1).
  std::array<std::optional<double>, kCompareMetrics.size()> ratio{};
};

struct CompareTable {
  std::string baseline;
  std::vector<RunRecord> runs;
  std::vector<ArmStats> arms;  // in order of first appearance
};

/// Reads summary.json of one artifact directory. Throws CompareError for a
/// missing file or an unexpected schema.
RunRecord read_run(const std::string& dir);

RunRecord record_from_summary(const nlohmann::json& summary, const std::string& dir);

/// Needs at least two directories. The baseline defaults to the first arm.
CompareTable compare(const std::vector<std::string>& dirs, const std::string& baseline = "");

CompareTable compare_records(std::vector<RunRecord> runs, const std::string& baseline = "");

void write_compare_text(std::ostream& out, const CompareTable& t);
void write_compare_csv(std::ostream& out, const CompareTable& t);

struct BatchResult {
  std::vector<std::string> run_dirs;
  std::string ensemble_path;
};

/// Runs \p base once per seed into <out_root>/seed-<n>, then folds the final
/// networks in seed order with ensemble_average. Dynamic mode only.
BatchResult run_batch(const ExperimentConfig& base, const std::vector<std::uint64_t>& seeds,
                      const std::string& out_root, double alpha = 0.5);

}  // namespace desired::experiment
