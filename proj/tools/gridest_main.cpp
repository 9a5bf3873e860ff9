#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridest/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "gridest - line impedance estimation for radial distribution grids "
      "from non-synchronized P/Q/|V| sensor data"};
  app.require_subcommand(1);

  gridest::cli::RunConfig run;
  gridest::cli::GenerateOptions gen;
  std::vector<long> sizes;
  bool random_subsample = false;
  std::uint64_t seed_value = 0;
  std::int64_t duration_value = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_measurements) {
    cmd->add_option("--topology", run.topology_path, "topology JSON file")
        ->required();
    if (needs_measurements) {
      cmd->add_option("--measurements", run.measurements_path,
                      "measurement CSV file")
          ->required();
      cmd->add_option("--benchmark", run.benchmark_path,
                      "catalog benchmark CSV (line_id,r_ohm_per_km,"
                      "l_h_per_km,length_km)");
      cmd->add_option("--truth", run.truth_path,
                      "ground-truth CSV (line_id,phase,z_ohm,delta_rad)");
      cmd->add_option("--v-nominal", run.v_nominal, "nominal voltage [V]");
      cmd->add_option("--v-min", run.v_min_override,
                      "feasible band lower limit [V]");
      cmd->add_option("--v-max", run.v_max_override,
                      "feasible band upper limit [V]");
      cmd->add_option("--min-samples", run.min_samples,
                      "usable samples required per channel");
      cmd->add_option("--variant", run.estimator_variant,
                      "first_moment or second_moment")
          ->check(CLI::IsMember({"first_moment", "second_moment"}));
      cmd->add_option("--frequency", run.frequency_hz,
                      "system frequency [Hz], for benchmark reactance");
    }
    cmd->add_option("--out", run.output_dir, "output directory");
  };

  CLI::App* cmd_decompose =
      app.add_subcommand("decompose", "classify every line into cases 1-4");
  add_common(cmd_decompose, false);

  CLI::App* cmd_estimate =
      app.add_subcommand("estimate", "run the full estimation pipeline");
  add_common(cmd_estimate, true);

  CLI::App* cmd_sensitivity = app.add_subcommand(
      "sensitivity", "estimation error versus measurement count");
  add_common(cmd_sensitivity, true);
  cmd_sensitivity
      ->add_option("--sizes", sizes, "sample counts to evaluate (e.g. 500 5000)")
      ->required();
  cmd_sensitivity->add_flag("--random-subsample", random_subsample,
                            "seeded random subsampling instead of prefixes");
  auto* sens_seed =
      cmd_sensitivity->add_option("--seed", seed_value, "subsample seed");

  CLI::App* cmd_generate = app.add_subcommand(
      "generate", "realize a synthetic scenario into measurement files");
  cmd_generate->add_option("--scenario", gen.scenario_path,
                           "scenario JSON (omit for the built-in preset)");
  cmd_generate->add_option("--nodes", gen.preset_nodes, "preset node count");
  cmd_generate->add_option("--coverage", gen.preset_coverage,
                           "preset sensor coverage fraction");
  cmd_generate->add_option("--imbalance", gen.preset_imbalance,
                           "preset per-phase load imbalance");
  auto* gen_seed = cmd_generate->add_option("--seed", seed_value, "RNG seed");
  auto* gen_duration = cmd_generate->add_option(
      "--duration", duration_value, "horizon in seconds (default 30 days)");
  cmd_generate->add_option("--out", gen.output_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  if (cmd_decompose->parsed()) return gridest::cli::cmd_decompose(run);
  if (cmd_estimate->parsed()) return gridest::cli::cmd_estimate(run);
  if (cmd_sensitivity->parsed()) {
    if (sens_seed->count() > 0) run.seed = seed_value;
    return gridest::cli::cmd_sensitivity(run, sizes, random_subsample);
  }
  if (cmd_generate->parsed()) {
    if (gen_seed->count() > 0) gen.seed = seed_value;
    if (gen_duration->count() > 0) gen.duration_s = duration_value;
    return gridest::cli::cmd_generate(gen);
  }
  std::cerr << app.help();
  return gridest::cli::kExitConfigError;
}
