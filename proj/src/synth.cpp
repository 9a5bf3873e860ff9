#include "gridest/synth.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "gridest/decomposer.hpp"
#include "gridest/estimator.hpp"
#include "gridest/report.hpp"

namespace gridest::synth {

namespace {

constexpr double kConvergenceVolts = 1e-10;
constexpr int kMaxSweeps = 100;
constexpr double kSmallAngleRad = 0.02;

// Stream purposes for seed derivation.
enum : int {
  kTagLoad = 1,
  kTagNoiseP = 2,
  kTagNoiseQ = 3,
  kTagNoiseV = 4,
  kTagCalibration = 5,
  kTagMissing = 6,
  kTagClock = 7,
};

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t base, std::string_view node,
                          int channel_tag) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (char c : node) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  std::uint64_t x = base ^ h ^ (static_cast<std::uint64_t>(channel_tag) << 56);
  splitmix64(x);  // decorrelate nearby tags
  return x;
}

double next_uniform(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

double next_normal(std::uint64_t& state) {
  double u1 = next_uniform(state);
  double u2 = next_uniform(state);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

void SimulationScenario::validate() const {
  auto fail = [](const std::string& what) {
    throw ScenarioError(ScenarioErrc::InvalidScenario, what);
  };
  if (v_nominal <= 0.0) fail("v_nominal must be positive");
  if (noise_pct < 0.0) fail("noise_pct must be non-negative");
  if (calibration_pct < 0.0) fail("calibration_pct must be non-negative");
  if (missing_rate < 0.0 || missing_rate >= 1.0) {
    fail("missing_rate must lie in [0, 1)");
  }
  if (sample_interval_s <= 0) fail("sample_interval_s must be positive");
  if (load_step_s <= 0) fail("load_step_s must be positive");
  if (duration_s < 0) fail("duration_s must be non-negative");
  if (root_voltage_pu <= 0.0) fail("root_voltage_pu must be positive");
  for (const auto& line : topology.lines()) {
    for (Phase ph : kAllPhases) {
      auto it = true_impedances.find({line.line_id, ph});
      if (it == true_impedances.end()) {
        fail("missing impedance for line " + line.line_id);
      }
      if (it->second.z_mag <= 0.0) {
        fail("impedance must be positive on line " + line.line_id);
      }
    }
  }
  for (const auto& [key, spec] : loads) {
    if (!topology.contains(key.first)) fail("load on unknown node " + key.first);
    if (spec.base_w < 0.0) fail("load base must be non-negative");
  }
}

ScenarioSimulator::ScenarioSimulator(const SimulationScenario& scenario)
    : sc_(scenario) {
  sc_.validate();
  // Root-first ordering; walking it in reverse visits children first.
  std::deque<NodeId> queue{sc_.topology.root()};
  while (!queue.empty()) {
    NodeId n = queue.front();
    queue.pop_front();
    index_[n] = static_cast<int>(order_.size());
    order_.push_back(n);
    for (const auto& c : sc_.topology.children(n)) queue.push_back(c);
  }
  const int n_nodes = static_cast<int>(order_.size());
  parent_.assign(n_nodes, -1);
  children_.assign(n_nodes, {});
  for (int i = 0; i < n_nodes; ++i) {
    for (const auto& c : sc_.topology.children(order_[i])) {
      int ci = index_.at(c);
      parent_[ci] = i;
      children_[i].push_back(ci);
    }
  }
  for (int ph = 0; ph < 3; ++ph) {
    line_z_[ph].assign(n_nodes, {0.0, 0.0});
    load_specs_[ph].assign(n_nodes, nullptr);
    walks_[ph].assign(n_nodes, Walk{});
    scratch_.voltage[ph].assign(n_nodes, {0.0, 0.0});
    scratch_.current[ph].assign(n_nodes, {0.0, 0.0});
    load_scratch_[ph].assign(n_nodes, {0.0, 0.0});
    for (int i = 1; i < n_nodes; ++i) {
      const Line* pl = sc_.topology.parent_line(order_[i]);
      const LineImpedance& zi =
          sc_.true_impedances.at({pl->line_id, static_cast<Phase>(ph)});
      line_z_[ph][i] = std::polar(zi.z_mag, zi.delta);
    }
    for (int i = 0; i < n_nodes; ++i) {
      auto it = sc_.loads.find({order_[i], static_cast<Phase>(ph)});
      if (it == sc_.loads.end()) continue;
      load_specs_[ph][i] = &it->second;
      walks_[ph][i].rng_state =
          stream_seed(sc_.seed, order_[i], kTagLoad * 16 + ph);
    }
  }
}

std::int64_t ScenarioSimulator::step_count() const {
  return (sc_.duration_s + sc_.load_step_s - 1) / sc_.load_step_s;
}

int ScenarioSimulator::node_index(const NodeId& n) const {
  return index_.at(n);
}

std::complex<double> ScenarioSimulator::load_at_indexed(int node_idx,
                                                        int phase,
                                                        std::int64_t t) {
  const LoadSpec* spec = load_specs_[phase][node_idx];
  if (spec == nullptr) return {0.0, 0.0};
  Walk& walk = walks_[phase][node_idx];
  if (t < walk.next_step - 1) {
    // Backward access: replay the stream from scratch.
    walk.w = 1.0;
    walk.next_step = 0;
    walk.rng_state = stream_seed(sc_.seed, order_[node_idx],
                                 kTagLoad * 16 + phase);
  }
  while (walk.next_step <= t) {
    double step = spec->volatility * next_normal(walk.rng_state);
    walk.w = 1.0 + spec->mean_reversion * (walk.w - 1.0) + step;
    walk.w = std::clamp(walk.w, 0.35, 1.8);
    ++walk.next_step;
  }
  double p = spec->base_w * walk.w;
  return {p, p * std::tan(spec->pf_angle_rad)};
}

std::complex<double> ScenarioSimulator::load_at(const NodeId& node,
                                                Phase phase, std::int64_t t) {
  return load_at_indexed(index_.at(node), static_cast<int>(phase), t);
}

const ScenarioSimulator::IndexedSolution& ScenarioSimulator::solve_step_indexed(
    std::int64_t t) {
  const int n_nodes = static_cast<int>(order_.size());
  const std::complex<double> v_root{sc_.v_nominal * sc_.root_voltage_pu, 0.0};
  scratch_.max_angle_diff = 0.0;

  for (int ph = 0; ph < 3; ++ph) {
    auto& voltage = scratch_.voltage[ph];
    auto& current = scratch_.current[ph];
    auto& load = load_scratch_[ph];
    for (int i = 0; i < n_nodes; ++i) {
      load[i] = load_at_indexed(i, ph, t);
      voltage[i] = v_root;
      current[i] = {0.0, 0.0};
    }
    int iter = 0;
    while (true) {
      ++iter;
      // Backward: accumulate load currents leaf to root.
      for (int i = n_nodes - 1; i >= 0; --i) {
        std::complex<double> i_node =
            load[i] == std::complex<double>{0.0, 0.0}
                ? std::complex<double>{0.0, 0.0}
                : std::conj(load[i] / voltage[i]);
        for (int c : children_[i]) i_node += current[c];
        current[i] = i_node;
      }
      // Forward: update voltages root to leaf.
      double max_change = 0.0;
      voltage[0] = v_root;
      for (int i = 1; i < n_nodes; ++i) {
        std::complex<double> v_new =
            voltage[parent_[i]] - line_z_[ph][i] * current[i];
        max_change = std::max(
            max_change, std::abs(std::abs(v_new) - std::abs(voltage[i])));
        voltage[i] = v_new;
      }
      if (max_change < kConvergenceVolts) break;
      if (iter >= kMaxSweeps) {
        throw ScenarioError(ScenarioErrc::NonConvergence,
                            "power flow did not converge at step " +
                                std::to_string(t));
      }
    }
    for (int i = 1; i < n_nodes; ++i) {
      double diff =
          std::abs(std::arg(voltage[parent_[i]]) - std::arg(voltage[i]));
      scratch_.max_angle_diff = std::max(scratch_.max_angle_diff, diff);
    }
  }
  return scratch_;
}

StepSolution ScenarioSimulator::solve_step(std::int64_t t) {
  const IndexedSolution& fast = solve_step_indexed(t);
  StepSolution out;
  out.max_angle_diff = fast.max_angle_diff;
  for (int ph = 0; ph < 3; ++ph) {
    PhaseSolution& sol = out.phase[ph];
    for (std::size_t i = 0; i < order_.size(); ++i) {
      sol.voltage[order_[i]] = fast.voltage[ph][i];
    }
    for (const auto& line : sc_.topology.lines()) {
      sol.current[line.line_id] = fast.current[ph][index_.at(line.child)];
    }
  }
  return out;
}

namespace {

struct MeterState {
  NodeId node;
  int node_idx = -1;
  std::vector<int> child_idx;
  std::int64_t offset = 0;
  std::int64_t next_sample = 0;  // index k of the next emission
  std::array<std::array<double, 3>, 3> calibration{};  // [phase][channel]
  std::array<std::array<std::uint64_t, 3>, 3> noise{};  // [phase][channel]
  std::array<std::uint64_t, 3> missing{};               // [phase]
};

}  // namespace

EmulationStats emulate_sensors(const SimulationScenario& scenario,
                               std::ostream& out) {
  scenario.validate();
  ScenarioSimulator sim(scenario);
  EmulationStats stats;

  std::vector<MeterState> meters;
  for (const auto& n : scenario.topology.measured_nodes()) {
    MeterState m;
    m.node = n;
    m.node_idx = sim.node_index(n);
    for (const auto& c : scenario.topology.children(n)) {
      m.child_idx.push_back(sim.node_index(c));
    }
    auto off_it = scenario.clock_offsets.find(n);
    if (off_it != scenario.clock_offsets.end()) {
      m.offset = off_it->second;
    } else {
      std::uint64_t s = stream_seed(scenario.seed, n, kTagClock);
      m.offset = static_cast<std::int64_t>(
          next_uniform(s) * static_cast<double>(scenario.sample_interval_s));
    }
    for (int ph = 0; ph < 3; ++ph) {
      for (int ch = 0; ch < 3; ++ch) {
        std::uint64_t s =
            stream_seed(scenario.seed, n, kTagCalibration * 16 + ph * 3 + ch);
        m.calibration[ph][ch] = 1.0 + scenario.calibration_pct * next_normal(s);
        m.noise[ph][ch] =
            stream_seed(scenario.seed, n, (kTagNoiseP + ch) * 16 + ph);
      }
      m.missing[ph] = stream_seed(scenario.seed, n, kTagMissing * 16 + ph);
    }
    meters.push_back(std::move(m));
  }

  out << "timestamp,node,phase,p_w,q_var,v_v\n";

  std::string row;
  row.reserve(96);
  const std::int64_t steps = sim.step_count();
  for (std::int64_t s = 0; s < steps; ++s) {
    const std::int64_t window_end = (s + 1) * scenario.load_step_s;

    bool any_sample = false;
    for (const auto& m : meters) {
      std::int64_t t = m.offset + m.next_sample * scenario.sample_interval_s;
      if (t < window_end && t < scenario.duration_s) {
        any_sample = true;
        break;
      }
    }
    if (!any_sample) continue;

    const auto& sol = sim.solve_step_indexed(s);
    stats.max_angle_diff = std::max(stats.max_angle_diff, sol.max_angle_diff);

    for (auto& m : meters) {
      while (true) {
        std::int64_t t = m.offset + m.next_sample * scenario.sample_interval_s;
        if (t >= window_end || t >= scenario.duration_s) break;
        ++m.next_sample;
        for (int ph = 0; ph < 3; ++ph) {
          // Received complex power along the parent line; the feed-in flow
          // for the root. Reported negative when the node consumes.
          std::complex<double> v = sol.voltage[ph][m.node_idx];
          std::complex<double> flow_current;
          if (m.node_idx != 0) {
            flow_current = sol.current[ph][m.node_idx];
          } else {
            for (int c : m.child_idx) flow_current += sol.current[ph][c];
            std::complex<double> s_load =
                sim.load_at(m.node, static_cast<Phase>(ph), s);
            if (s_load != std::complex<double>{0.0, 0.0}) {
              flow_current += std::conj(s_load / v);
            }
          }
          std::complex<double> s_recv = v * std::conj(flow_current);
          double p_true = -s_recv.real();
          double q_true = -s_recv.imag();
          double v_true = std::abs(v);

          double p_meter = p_true * m.calibration[ph][0] *
                           (1.0 + scenario.noise_pct *
                                      next_normal(m.noise[ph][0]));
          double q_meter = q_true * m.calibration[ph][1] *
                           (1.0 + scenario.noise_pct *
                                      next_normal(m.noise[ph][1]));
          double v_meter = v_true * m.calibration[ph][2] *
                           (1.0 + scenario.noise_pct *
                                      next_normal(m.noise[ph][2]));

          if (next_uniform(m.missing[ph]) < scenario.missing_rate) {
            ++stats.samples_dropped;
            continue;
          }
          row.clear();
          row += std::to_string(scenario.start_epoch_s + t);
          row += ',';
          row += m.node;
          row += ',';
          row += to_string(static_cast<Phase>(ph));
          row += ',';
          row += format_double(p_meter);
          row += ',';
          row += format_double(q_meter);
          row += ',';
          row += format_double(v_meter);
          row += '\n';
          out << row;
          ++stats.samples_written;
        }
      }
    }
  }
  stats.small_angle_regime = stats.max_angle_diff < kSmallAngleRad;
  return stats;
}

void write_ground_truth_csv(const SimulationScenario& scenario,
                            std::ostream& out) {
  out << "line_id,phase,z_ohm,delta_rad\n";
  for (const auto& line : scenario.topology.lines()) {
    for (Phase ph : kAllPhases) {
      const LineImpedance& z = scenario.true_impedances.at({line.line_id, ph});
      out << line.line_id << ',' << to_string(ph) << ','
          << format_double(z.z_mag) << ',' << format_double(z.delta) << '\n';
    }
  }
}

void write_benchmark_csv(const SimulationScenario& scenario,
                         std::ostream& out) {
  out << "line_id,r_ohm_per_km,l_h_per_km,length_km\n";
  for (const auto& row : scenario.benchmark) {
    out << row.line_id << ',' << format_double(row.r_ohm_per_km) << ','
        << format_double(row.l_h_per_km) << ',' << format_double(row.length_km)
        << '\n';
  }
}

namespace {

struct CableType {
  double r_ohm_per_km;
  double k_formation;
  double s_axial_mm;
  double d_conductor_mm;
};

// Urban LV cable catalog: resistance from conductor tables, inductance from
// the handbook formula.
constexpr std::array<CableType, 3> kCatalog{{
    {0.320, 0.064, 9.00, 9.00},
    {0.253, 0.050, 10.45, 11.00},
    {0.206, 0.040, 9.57, 11.00},
}};

std::string two_digit_name(const char* prefix, int i) {
  std::ostringstream os;
  os << prefix << (i < 10 ? "0" : "") << i;
  return os.str();
}

}  // namespace

SimulationScenario make_aspern_like(const AspernConfig& config) {
  if (config.n_nodes < 2 || config.coverage < 0.0 || config.coverage > 1.0 ||
      config.imbalance < 0.0 || config.v_nominal <= 0.0 ||
      config.duration_s <= 0) {
    throw ScenarioError(ScenarioErrc::InvalidConfig,
                        "bad feeder generator configuration");
  }

  const NodeId root = "SUB";
  std::vector<NodeId> nodes{root};
  for (int i = 1; i < config.n_nodes; ++i) {
    nodes.push_back(two_digit_name("L", i));
  }

  std::uint64_t topo_rng = stream_seed(config.seed, "topology", 0);
  std::vector<Line> lines;
  std::map<NodeId, int> child_count;
  for (int i = 1; i < config.n_nodes; ++i) {
    // Attach to a random earlier node that still has fanout room.
    NodeId parent;
    while (true) {
      int pick = static_cast<int>(next_uniform(topo_rng) * i);
      parent = nodes[static_cast<std::size_t>(pick)];
      if (child_count[parent] < 3) break;
    }
    ++child_count[parent];
    lines.push_back(Line{two_digit_name("LN", i), parent, nodes[i]});
  }

  // Coverage counts the root: the substation sensor is placed first, so
  // zero coverage means a fully dark feeder and full coverage an all-case-1
  // one.
  const int n_measured =
      static_cast<int>(std::lround(config.coverage * config.n_nodes));
  std::set<NodeId> measured;
  std::uint64_t place_rng = stream_seed(config.seed, "placement", 0);
  const bool can_mix = config.require_all_cases && n_measured > 1 &&
                       n_measured < config.n_nodes && config.n_nodes >= 5;
  for (int attempt = 0; attempt < 200; ++attempt) {
    measured.clear();
    if (n_measured > 0) measured.insert(root);
    std::vector<NodeId> pool(nodes.begin() + 1, nodes.end());
    for (int k = 1; k < n_measured; ++k) {
      int pick = static_cast<int>(next_uniform(place_rng) *
                                  static_cast<double>(pool.size()));
      measured.insert(pool[static_cast<std::size_t>(pick)]);
      pool.erase(pool.begin() + pick);
    }
    if (!can_mix) break;
    GridTopology probe = build_topology(nodes, lines, root, measured);
    if (case_mix(decompose(probe)).all_present()) break;
  }

  SimulationScenario sc(build_topology(nodes, lines, root, measured));
  sc.v_nominal = config.v_nominal;
  sc.duration_s = config.duration_s;
  sc.seed = config.seed;
  sc.noise_pct = 0.01;
  sc.calibration_pct = 0.0005;
  sc.missing_rate = 0.02;

  std::uint64_t line_rng = stream_seed(config.seed, "cables", 0);
  for (const auto& line : sc.topology.lines()) {
    const CableType& cable = kCatalog[static_cast<std::size_t>(
        next_uniform(line_rng) * kCatalog.size())];
    double length_km = 0.08 + 0.22 * next_uniform(line_rng);
    double l_per_m = cable_inductance(cable.k_formation, cable.s_axial_mm,
                                      cable.d_conductor_mm);
    double x_per_km = 2.0 * M_PI * sc.frequency_hz * l_per_m * 1000.0;
    LineImpedance z;
    z.z_mag = length_km * std::hypot(cable.r_ohm_per_km, x_per_km);
    z.delta = std::atan(x_per_km / cable.r_ohm_per_km);
    for (Phase ph : kAllPhases) sc.true_impedances[{line.line_id, ph}] = z;
    sc.benchmark.push_back(BenchmarkRow{line.line_id, cable.r_ohm_per_km,
                                        l_per_m * 1000.0, length_km});
  }

  std::uint64_t load_rng = stream_seed(config.seed, "loads", 0);
  for (const auto& n : sc.topology.nodes()) {
    if (n == root) continue;
    double node_base =
        std::exp(std::log(1800.0) +
                 next_uniform(load_rng) * (std::log(5200.0) - std::log(1800.0)));
    double node_angle = 0.215 + 0.015 * next_normal(load_rng);
    for (Phase ph : kAllPhases) {
      LoadSpec spec;
      double skew = 1.0 + config.imbalance * (2.0 * next_uniform(load_rng) - 1.0);
      spec.base_w = node_base * skew;
      spec.pf_angle_rad = node_angle + 0.004 * next_normal(load_rng);
      spec.volatility = 0.08;
      spec.mean_reversion = 0.97;
      sc.loads[{n, ph}] = spec;
    }
  }
  return sc;
}

namespace {

nlohmann::json topology_to_json(const GridTopology& t) {
  nlohmann::json doc;
  doc["root"] = t.root();
  doc["nodes"] = t.nodes();
  doc["lines"] = nlohmann::json::array();
  for (const auto& l : t.lines()) {
    doc["lines"].push_back(
        {{"id", l.line_id}, {"from", l.parent}, {"to", l.child}});
  }
  doc["measured"] = t.measured_nodes();
  return doc;
}

}  // namespace

void save_scenario_json(const SimulationScenario& sc, std::ostream& out) {
  nlohmann::json doc;
  doc["topology"] = topology_to_json(sc.topology);
  doc["v_nominal"] = sc.v_nominal;
  doc["frequency_hz"] = sc.frequency_hz;
  doc["root_voltage_pu"] = sc.root_voltage_pu;
  doc["noise_pct"] = sc.noise_pct;
  doc["calibration_pct"] = sc.calibration_pct;
  doc["missing_rate"] = sc.missing_rate;
  doc["sample_interval_s"] = sc.sample_interval_s;
  doc["load_step_s"] = sc.load_step_s;
  doc["duration_s"] = sc.duration_s;
  doc["start_epoch_s"] = sc.start_epoch_s;
  doc["seed"] = sc.seed;
  doc["impedances"] = nlohmann::json::array();
  for (const auto& [key, z] : sc.true_impedances) {
    doc["impedances"].push_back({{"line", key.first},
                                 {"phase", to_string(key.second)},
                                 {"z_ohm", z.z_mag},
                                 {"delta_rad", z.delta}});
  }
  doc["loads"] = nlohmann::json::array();
  for (const auto& [key, spec] : sc.loads) {
    doc["loads"].push_back({{"node", key.first},
                            {"phase", to_string(key.second)},
                            {"base_w", spec.base_w},
                            {"pf_angle_rad", spec.pf_angle_rad},
                            {"volatility", spec.volatility},
                            {"mean_reversion", spec.mean_reversion}});
  }
  if (!sc.clock_offsets.empty()) {
    nlohmann::json offsets;
    for (const auto& [node, off] : sc.clock_offsets) offsets[node] = off;
    doc["clock_offsets"] = offsets;
  }
  if (!sc.benchmark.empty()) {
    doc["benchmark"] = nlohmann::json::array();
    for (const auto& row : sc.benchmark) {
      doc["benchmark"].push_back({{"line", row.line_id},
                                  {"r_ohm_per_km", row.r_ohm_per_km},
                                  {"l_h_per_km", row.l_h_per_km},
                                  {"length_km", row.length_km}});
    }
  }
  out << doc.dump(2) << "\n";
}

SimulationScenario load_scenario_json(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(ScenarioErrc::InvalidScenario,
                        std::string("scenario is not valid JSON: ") + e.what());
  }
  try {
    const auto& topo = doc.at("topology");
    std::vector<NodeId> nodes;
    for (const auto& n : topo.at("nodes")) nodes.push_back(n.get<std::string>());
    std::vector<Line> lines;
    for (const auto& l : topo.at("lines")) {
      lines.push_back(Line{l.at("id").get<std::string>(),
                           l.at("from").get<std::string>(),
                           l.at("to").get<std::string>()});
    }
    std::set<NodeId> measured;
    for (const auto& m : topo.at("measured")) measured.insert(m.get<std::string>());

    SimulationScenario sc(build_topology(nodes, lines,
                                         topo.at("root").get<std::string>(),
                                         measured));
    sc.v_nominal = doc.value("v_nominal", 230.0);
    sc.frequency_hz = doc.value("frequency_hz", 50.0);
    sc.root_voltage_pu = doc.value("root_voltage_pu", 1.0);
    sc.noise_pct = doc.value("noise_pct", 0.01);
    sc.calibration_pct = doc.value("calibration_pct", 0.0);
    sc.missing_rate = doc.value("missing_rate", 0.0);
    sc.sample_interval_s = doc.value("sample_interval_s", std::int64_t{150});
    sc.load_step_s = doc.value("load_step_s", std::int64_t{30});
    sc.duration_s = doc.value("duration_s", std::int64_t{0});
    sc.start_epoch_s = doc.value("start_epoch_s", std::int64_t{1525132800});
    sc.seed = doc.value("seed", std::uint64_t{1});
    for (const auto& z : doc.at("impedances")) {
      auto ph = phase_from_string(z.at("phase").get<std::string>());
      if (!ph) {
        throw ScenarioError(ScenarioErrc::InvalidScenario,
                            "bad phase in impedance entry");
      }
      sc.true_impedances[{z.at("line").get<std::string>(), *ph}] =
          LineImpedance{z.at("z_ohm").get<double>(),
                        z.at("delta_rad").get<double>()};
    }
    for (const auto& l : doc.at("loads")) {
      auto ph = phase_from_string(l.at("phase").get<std::string>());
      if (!ph) {
        throw ScenarioError(ScenarioErrc::InvalidScenario,
                            "bad phase in load entry");
      }
      LoadSpec spec;
      spec.base_w = l.at("base_w").get<double>();
      spec.pf_angle_rad = l.at("pf_angle_rad").get<double>();
      spec.volatility = l.value("volatility", 0.0);
      spec.mean_reversion = l.value("mean_reversion", 0.97);
      sc.loads[{l.at("node").get<std::string>(), *ph}] = spec;
    }
    if (doc.contains("clock_offsets")) {
      for (const auto& [node, off] : doc.at("clock_offsets").items()) {
        sc.clock_offsets[node] = off.get<std::int64_t>();
      }
    }
    if (doc.contains("benchmark")) {
      for (const auto& b : doc.at("benchmark")) {
        sc.benchmark.push_back(BenchmarkRow{
            b.at("line").get<std::string>(), b.at("r_ohm_per_km").get<double>(),
            b.at("l_h_per_km").get<double>(), b.at("length_km").get<double>()});
      }
    }
    sc.validate();
    return sc;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(ScenarioErrc::InvalidScenario,
                        std::string("scenario document malformed: ") + e.what());
  }
}

SimulationScenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError(ScenarioErrc::InvalidScenario,
                        "cannot open scenario file " + path);
  }
  return load_scenario_json(in);
}

}  // namespace gridest::synth
