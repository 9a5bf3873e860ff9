#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gridest::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitParseError = 3;
inline constexpr int kExitNoResults = 4;

struct RunConfig {
  std::string topology_path;
  std::string measurements_path;
  std::string benchmark_path;     // catalog reference (optional)
  std::string truth_path;         // per-phase ground truth (optional)
  double v_nominal = 230.0;
  std::optional<double> v_min_override;
  std::optional<double> v_max_override;
  long min_samples = 100;
  std::string estimator_variant = "first_moment";  // or "second_moment"
  double frequency_hz = 50.0;
  std::string output_dir = ".";
  std::optional<std::uint64_t> seed;
};

/// Runs decomposition + estimation, writes classification.csv,
/// estimates.csv, estimates.json and (with a reference) comparison.csv plus
/// summary statistics on stdout.
int cmd_estimate(const RunConfig& config);

/// Classification only: table to stdout, classification.csv to output_dir.
int cmd_decompose(const RunConfig& config);

/// Estimates on truncated measurement prefixes of the given sizes and
/// writes sensitivity.csv (n_samples,line_id,phase,err_pct,err_delta_deg).
/// `random_subsample` switches prefix truncation to seeded subsampling.
int cmd_sensitivity(const RunConfig& config, const std::vector<long>& sizes,
                    bool random_subsample = false);

struct GenerateOptions {
  std::string scenario_path;  // empty -> built-in preset
  std::string preset = "aspern";
  int preset_nodes = 15;
  double preset_coverage = 0.5;
  double preset_imbalance = 0.3;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> duration_s;
  std::string output_dir = ".";
};

/// Realizes a scenario: writes scenario.json, topology.json,
/// measurements.csv, ground_truth.csv, benchmark.csv and prints the case-mix
/// summary of the generated topology.
int cmd_generate(const GenerateOptions& options);

}  // namespace gridest::cli
