#include "gridest/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "gridest/decomposer.hpp"
#include "gridest/estimator.hpp"
#include "gridest/grid_model.hpp"
#include "gridest/measurement.hpp"
#include "gridest/report.hpp"
#include "gridest/synth.hpp"

namespace gridest::cli {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + (dir / name).string());
  }
  return out;
}

struct LoadedInputs {
  GridTopology topology;
  MeasurementSet measurements;
  ReferenceTable reference;
  bool has_reference = false;
};

LoadedInputs load_inputs(const RunConfig& config, bool need_measurements) {
  auto topo = load_topology_file(config.topology_path);
  for (const auto& w : topo.warnings) std::cerr << "warning: " << w << "\n";

  LoadedInputs inputs{std::move(topo.topology), MeasurementSet{},
                      ReferenceTable{}, false};
  if (need_measurements) {
    auto ingest = ingest_csv_file(config.measurements_path);
    const auto& rep = ingest.report;
    std::cerr << "ingested " << rep.rows_read << " rows (skipped "
              << rep.rows_skipped << ", duplicates " << rep.duplicates
              << ", missing p/q/v " << rep.missing_p << "/" << rep.missing_q
              << "/" << rep.missing_v << ")\n";
    inputs.measurements = MeasurementSet(std::move(ingest.series));
  }
  if (!config.truth_path.empty()) {
    std::ifstream in(config.truth_path);
    if (!in) throw std::runtime_error("cannot open " + config.truth_path);
    inputs.reference = ReferenceTable::from_ground_truth_csv(in);
    inputs.has_reference = true;
  } else if (!config.benchmark_path.empty()) {
    std::ifstream in(config.benchmark_path);
    if (!in) throw std::runtime_error("cannot open " + config.benchmark_path);
    inputs.reference =
        ReferenceTable::from_benchmark_csv(in, config.frequency_hz);
    inputs.has_reference = true;
  }
  return inputs;
}

FeasibleVoltageBand band_from(const RunConfig& config) {
  FeasibleVoltageBand band = make_band(config.v_nominal);
  if (config.v_min_override) band.v_min = *config.v_min_override;
  if (config.v_max_override) band.v_max = *config.v_max_override;
  return band;
}

EstimationConfig estimation_config_from(const RunConfig& config) {
  EstimationConfig ec;
  ec.min_samples = config.min_samples;
  ec.variant = config.estimator_variant == "second_moment"
                   ? EstimatorVariant::SecondMoment
                   : EstimatorVariant::FirstMoment;
  return ec;
}

bool has_numbers(const std::vector<ImpedanceEstimate>& rows) {
  for (const auto& e : rows) {
    if (e.z_mag || e.z_upper) return true;
  }
  return false;
}

}  // namespace

int cmd_decompose(const RunConfig& config) {
  std::optional<LoadedInputs> inputs;
  try {
    inputs.emplace(load_inputs(config, /*need_measurements=*/false));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }
  auto rows = decompose(inputs->topology);
  write_classification_text(rows, std::cout);
  auto out = open_out(config.output_dir, "classification.csv");
  write_classification_csv(rows, out);
  return kExitOk;
}

int cmd_estimate(const RunConfig& config) {
  if (config.topology_path.empty() || config.measurements_path.empty() ||
      config.v_nominal <= 0.0) {
    std::cerr << "error: topology, measurements and a positive v-nominal are "
                 "required\n";
    return kExitConfigError;
  }
  std::optional<LoadedInputs> loaded;
  try {
    loaded.emplace(load_inputs(config, /*need_measurements=*/true));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }
  const LoadedInputs& inputs = *loaded;

  auto classification = decompose(inputs.topology);
  auto estimates = estimate_all(inputs.topology, inputs.measurements,
                                band_from(config),
                                estimation_config_from(config));

  fs::path dir(config.output_dir);
  {
    auto out = open_out(dir, "classification.csv");
    write_classification_csv(classification, out);
  }
  {
    auto out = open_out(dir, "estimates.csv");
    write_estimates_csv(estimates, out);
  }
  {
    auto out = open_out(dir, "estimates.json");
    write_estimates_json(estimates, out);
  }
  write_phase_spread_summary(estimates, std::cout);
  if (inputs.has_reference) {
    auto rows = compare_estimates(estimates, inputs.reference);
    auto out = open_out(dir, "comparison.csv");
    write_comparison_csv(rows, out);
    write_comparison_summary(summarize_comparison(rows), std::cout);
  }
  if (!has_numbers(estimates)) {
    std::cerr << "error: estimation produced no numeric results\n";
    return kExitNoResults;
  }
  return kExitOk;
}

int cmd_sensitivity(const RunConfig& config, const std::vector<long>& sizes,
                    bool random_subsample) {
  if (config.topology_path.empty() || config.measurements_path.empty() ||
      sizes.empty()) {
    std::cerr << "error: topology, measurements and --sizes are required\n";
    return kExitConfigError;
  }
  if (config.truth_path.empty() && config.benchmark_path.empty()) {
    std::cerr << "error: sensitivity needs --truth or --benchmark\n";
    return kExitConfigError;
  }
  std::optional<LoadedInputs> loaded;
  try {
    loaded.emplace(load_inputs(config, /*need_measurements=*/true));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }
  const LoadedInputs& inputs = *loaded;

  long max_size = *std::max_element(sizes.begin(), sizes.end());
  auto available = static_cast<long>(inputs.measurements.min_samples());
  if (max_size > available) {
    std::cerr << "error: requested size " << max_size
              << " exceeds available samples (" << available << ")\n";
    return kExitConfigError;
  }

  FeasibleVoltageBand band = band_from(config);
  EstimationConfig ec = estimation_config_from(config);
  std::vector<SensitivityRow> rows;
  for (long n : sizes) {
    MeasurementSet slice =
        random_subsample
            ? inputs.measurements.random_subsample(
                  static_cast<std::size_t>(n), config.seed.value_or(1))
            : inputs.measurements.prefix(static_cast<std::size_t>(n));
    auto estimates = estimate_all(inputs.topology, slice, band, ec);
    for (const auto& cmp : compare_estimates(estimates, inputs.reference)) {
      SensitivityRow row;
      row.n_samples = n;
      row.line_id = cmp.estimate.line_id;
      row.phase = cmp.estimate.phase;
      row.err_pct = cmp.err_pct;
      row.err_delta_deg = cmp.err_delta_deg;
      rows.push_back(std::move(row));
    }
  }
  auto out = open_out(config.output_dir, "sensitivity.csv");
  write_sensitivity_csv(rows, out);
  return kExitOk;
}

int cmd_generate(const GenerateOptions& options) {
  std::optional<synth::SimulationScenario> loaded;
  try {
    if (!options.scenario_path.empty()) {
      loaded.emplace(synth::load_scenario_file(options.scenario_path));
    } else {
      synth::AspernConfig cfg;
      cfg.n_nodes = options.preset_nodes;
      cfg.coverage = options.preset_coverage;
      cfg.imbalance = options.preset_imbalance;
      if (options.seed) cfg.seed = *options.seed;
      if (options.duration_s) cfg.duration_s = *options.duration_s;
      loaded.emplace(synth::make_aspern_like(cfg));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }
  synth::SimulationScenario& scenario = *loaded;
  if (options.seed) scenario.seed = *options.seed;
  if (options.duration_s) scenario.duration_s = *options.duration_s;

  fs::path dir(options.output_dir);
  {
    auto out = open_out(dir, "scenario.json");
    synth::save_scenario_json(scenario, out);
  }
  {
    auto out = open_out(dir, "topology.json");
    save_topology_json(scenario.topology, out);
  }
  {
    auto out = open_out(dir, "ground_truth.csv");
    synth::write_ground_truth_csv(scenario, out);
  }
  if (!scenario.benchmark.empty()) {
    auto out = open_out(dir, "benchmark.csv");
    synth::write_benchmark_csv(scenario, out);
  }
  synth::EmulationStats stats;
  {
    auto out = open_out(dir, "measurements.csv");
    stats = synth::emulate_sensors(scenario, out);
  }

  auto classification = decompose(scenario.topology);
  CaseMix mix = case_mix(classification);
  std::cout << "generated " << stats.samples_written << " samples ("
            << stats.samples_dropped << " dropped) for "
            << scenario.topology.measured_nodes().size() << " sensors\n"
            << "case mix: case1=" << mix.case1 << " case2=" << mix.case2
            << " case3=" << mix.case3 << " case4=" << mix.case4 << "\n";
  if (!stats.small_angle_regime) {
    std::cout << "note: max neighbor angle difference "
              << format_double(stats.max_angle_diff)
              << " rad exceeds the small-angle regime\n";
  }
  return kExitOk;
}

}  // namespace gridest::cli
