#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gridest/errors.hpp"
#include "gridest/grid_model.hpp"
#include "gridest/types.hpp"

namespace gridest::synth {

struct LineImpedance {
  double z_mag = 0.0;  // ohm
  double delta = 0.0;  // rad

  bool operator==(const LineImpedance& other) const = default;
};

/// Constant-power load generator parameters for one (node, phase) channel.
/// The magnitude follows a clamped AR(1) walk around base_w; the power
/// factor angle is fixed per channel.
struct LoadSpec {
  double base_w = 0.0;
  double pf_angle_rad = 0.0;     // consumption power angle, >0 inductive
  double volatility = 0.0;       // AR(1) step sigma, relative
  double mean_reversion = 0.97;  // AR(1) pull toward 1.0
};

struct BenchmarkRow {
  std::string line_id;
  double r_ohm_per_km = 0.0;
  double l_h_per_km = 0.0;
  double length_km = 0.0;
};

/// Ground-truth world the emulator samples: everything is derived
/// deterministically from `seed`.
struct SimulationScenario {
  explicit SimulationScenario(GridTopology t) : topology(std::move(t)) {}

  GridTopology topology;
  std::map<std::pair<std::string, Phase>, LineImpedance> true_impedances;
  std::map<std::pair<NodeId, Phase>, LoadSpec> loads;

  double v_nominal = 230.0;
  double frequency_hz = 50.0;
  double root_voltage_pu = 1.0;

  double noise_pct = 0.01;        // per-sample multiplicative sigma
  double calibration_pct = 0.0;   // fixed per-(node,channel) offset sigma
  double missing_rate = 0.0;      // probability a sample row is dropped

  std::int64_t sample_interval_s = 150;
  std::int64_t load_step_s = 30;  // load-profile resolution
  std::int64_t duration_s = 0;
  std::int64_t start_epoch_s = 1525132800;  // 2018-05-01T00:00:00Z

  std::map<NodeId, std::int64_t> clock_offsets;  // seeded when empty
  std::uint64_t seed = 1;

  std::vector<BenchmarkRow> benchmark;  // catalog rows, when generated

  void validate() const;  // throws InvalidScenario
};

/// One phase of one solved instant.
struct PhaseSolution {
  std::map<NodeId, std::complex<double>> voltage;
  // Branch current by line id, oriented parent -> child.
  std::map<std::string, std::complex<double>> current;
};

/// All three phases of one solved instant.
struct StepSolution {
  std::array<PhaseSolution, 3> phase;
  double max_angle_diff = 0.0;  // max |arg Vi - arg Vj| over lines
};

/// Stateful solver over a scenario. Load walks advance with the step index,
/// so sequential stepping is O(1) per step; random access replays from the
/// last solved step (or from zero when going backwards).
class ScenarioSimulator {
 public:
  explicit ScenarioSimulator(const SimulationScenario& scenario);

  std::int64_t step_count() const;

  /// Backward/forward sweep at load step `t` (exact complex arithmetic, no
  /// small-angle shortcut). Converged when the largest voltage-magnitude
  /// change between sweeps is below 1e-10 V; throws NonConvergence after
  /// 100 iterations.
  StepSolution solve_step(std::int64_t t);

  /// Consumption (positive) complex power of a channel at step t.
  std::complex<double> load_at(const NodeId& node, Phase phase,
                               std::int64_t t);

  // Index-based access for tight loops: nodes are numbered root-first in
  // breadth-first order; each non-root node stands for its parent line.
  int node_index(const NodeId& n) const;
  const std::vector<NodeId>& node_order() const { return order_; }
  int parent_index(int node_idx) const { return parent_[node_idx]; }

  struct IndexedSolution {
    // [phase][node index]; current is the parent-line branch current and
    // meaningless at the root slot.
    std::array<std::vector<std::complex<double>>, 3> voltage;
    std::array<std::vector<std::complex<double>>, 3> current;
    double max_angle_diff = 0.0;
  };

  /// Same sweep, no per-call allocation; the result stays valid until the
  /// next call.
  const IndexedSolution& solve_step_indexed(std::int64_t t);

 private:
  struct Walk {
    double w = 1.0;
    std::uint64_t rng_state = 0;
    std::int64_t next_step = 0;
  };

  std::complex<double> load_at_indexed(int node_idx, int phase,
                                       std::int64_t t);

  const SimulationScenario& sc_;
  std::vector<NodeId> order_;
  std::map<NodeId, int> index_;
  std::vector<int> parent_;                    // -1 at the root
  std::vector<std::vector<int>> children_;
  std::array<std::vector<std::complex<double>>, 3> line_z_;  // by child idx
  std::array<std::vector<const LoadSpec*>, 3> load_specs_;
  std::array<std::vector<Walk>, 3> walks_;
  IndexedSolution scratch_;
  std::array<std::vector<std::complex<double>>, 3> load_scratch_;
};

struct EmulationStats {
  long samples_written = 0;
  long samples_dropped = 0;
  double max_angle_diff = 0.0;
  bool small_angle_regime = true;  // max angle diff < 0.02 rad
};

/// Runs the solver over the whole horizon and writes the measurement CSV
/// for every measured node: per-phase received P/Q along the parent line
/// (feed-in flow for the root) and |V|, at sample_interval_s spacing shifted
/// by the node clock offset, with multiplicative noise and seeded dropouts.
/// Voltage angles never leave this function. Deterministic given the seed.
EmulationStats emulate_sensors(const SimulationScenario& scenario,
                               std::ostream& measurements_csv);

/// Companion scoring file: line_id,phase,z_ohm,delta_rad.
void write_ground_truth_csv(const SimulationScenario& scenario,
                            std::ostream& out);

/// Catalog benchmark file: line_id,r_ohm_per_km,l_h_per_km,length_km.
void write_benchmark_csv(const SimulationScenario& scenario,
                         std::ostream& out);

struct AspernConfig {
  int n_nodes = 15;
  double coverage = 0.5;       // fraction of non-root nodes with a sensor
  double imbalance = 0.3;      // per-phase load spread
  double v_nominal = 230.0;
  std::int64_t duration_s = 30LL * 86400;
  std::uint64_t seed = 1;
  bool require_all_cases = true;  // re-draw placement until cases 1-4 appear
};

/// Random radial feeder in the style of an urban low-voltage subnet: cable
/// impedances from a small catalog (resistance table plus the handbook
/// inductance formula), seeded sensor placement at the given coverage, and
/// unbalanced per-phase loads. Throws InvalidConfig.
SimulationScenario make_aspern_like(const AspernConfig& config);

/// Scenario document I/O (JSON).
SimulationScenario load_scenario_json(std::istream& in);
SimulationScenario load_scenario_file(const std::string& path);
void save_scenario_json(const SimulationScenario& scenario, std::ostream& out);

/// Deterministic per-purpose RNG streams (splitmix64-based).
std::uint64_t stream_seed(std::uint64_t base, std::string_view node,
                          int channel_tag);
double next_uniform(std::uint64_t& state);          // [0, 1)
double next_normal(std::uint64_t& state);           // N(0, 1), Box-Muller

}  // namespace gridest::synth
