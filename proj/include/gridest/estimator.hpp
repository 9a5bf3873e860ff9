#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridest/decomposer.hpp"
#include "gridest/errors.hpp"
#include "gridest/grid_model.hpp"
#include "gridest/measurement.hpp"
#include "gridest/types.hpp"

namespace gridest {

/// Feasible voltage region used when a sending-end voltage is unmeasured.
struct FeasibleVoltageBand {
  double v_nominal = 230.0;
  double v_min = 218.5;
  double v_max = 241.5;
};

/// Band with the standard 0.95/1.05 limits (overridable).
FeasibleVoltageBand make_band(double v_nominal, double lo_factor = 0.95,
                              double hi_factor = 1.05);

enum class EstimateQuality {
  Exact,           // case 1
  Bounded,         // case 2, interval [0, z_upper]
  EquivalentLoad,  // case 3, line plus unmetered local loads
  Shared,          // case 4, equal split of an ancestor equivalent
  Undetermined,    // no procedure applies; see reason
};

const char* to_string(EstimateQuality q);

enum class EstimateReason {
  None,
  ZeroMeanCurrent,
  InsufficientData,
  WindowOverlapTooSmall,
  ZeroResidualPower,
  NoMeasuredAncestor,
  MissingSeries,
  SignConventionSuspect,  // estimate kept, value sign looks wrong
};

const char* to_string(EstimateReason r);

struct ImpedanceEstimate {
  std::string line_id;
  NodeId parent;
  NodeId child;
  Phase phase = Phase::A;
  LineCase line_case = LineCase::Case1;
  EstimateQuality quality = EstimateQuality::Undetermined;
  std::optional<double> z_mag;    // ohm
  std::optional<double> delta;    // rad, in (-pi/2, pi/2]
  std::optional<double> z_lower;  // ohm, case 2 only
  std::optional<double> z_upper;  // ohm, case 2 only (may be +inf)
  long n_samples_used = 0;
  EstimateReason reason = EstimateReason::None;
  // Raw signed equivalent components for cases 3/4; a negative sign means
  // the residual injection was net-consuming.
  std::optional<double> raw_r;
  std::optional<double> raw_x;
};

enum class EstimatorVariant {
  FirstMoment,   // Z = (E[Vi]-E[Vj]) / E[I]
  SecondMoment,  // Z = sqrt(E[(Vi-Vj)^2] / E[I^2]), cross term via
                 // independence of the two unsynchronized channels
};

struct EstimationConfig {
  EstimatorVariant variant = EstimatorVariant::FirstMoment;
  long min_samples = 100;           // usable samples per channel
  double min_window_overlap = 0.5;  // fraction of the shorter window
};

/// Channel statistics plus the observation window they cover.
struct ChannelStats {
  PhaseMoments m;
  std::int64_t window_begin = 0;
  std::int64_t window_end = 0;
};

/// Read-only state the case-3/case-4 estimators consume: per-channel
/// statistics and the estimates completed by earlier stages. Frozen while
/// any dependent estimation reads it.
class EstimationContext {
 public:
  void put_stats(const NodeId& n, Phase ph, ChannelStats s);
  const ChannelStats* stats(const NodeId& n, Phase ph) const;

  void put_estimate(const ImpedanceEstimate& e);
  const ImpedanceEstimate* estimate(const std::string& line_id,
                                    Phase ph) const;

 private:
  std::map<std::pair<NodeId, Phase>, ChannelStats> stats_;
  std::map<std::pair<std::string, Phase>, ImpedanceEstimate> estimates_;
};

/// Case 1: both endpoints measured. z = (E[Vi]-E[Vj])/E[Iij], delta =
/// E[phi_j]. A negative magnitude is kept and flagged SignConventionSuspect
/// rather than clamped. Throws ZeroMeanCurrent / InsufficientData.
ImpedanceEstimate estimate_case1(
    const Line& line, Phase phase, const PhaseMoments& m_i,
    const PhaseMoments& m_j,
    EstimatorVariant variant = EstimatorVariant::FirstMoment);

/// Case 2: only the receiving end measured. Produces the bound
/// [0, z_upper] with z_upper from the feasible band and the sign of E[I];
/// +inf when E[I] = 0. delta = E[phi_j].
ImpedanceEstimate estimate_case2(const Line& line, Phase phase,
                                 const PhaseMoments& m_j,
                                 const FeasibleVoltageBand& band);

/// Case 3: only the sending end measured. Shares the residual injection at
/// node i across its unobserved branches and returns the equivalent-load
/// impedance (line plus unmetered loads). Magnitudes are reported in z_mag;
/// the raw signed components are kept in raw_r/raw_x. Throws
/// ZeroResidualPower / InsufficientData.
ImpedanceEstimate estimate_case3(const Line& line, Phase phase,
                                 const GridTopology& t,
                                 const EstimationContext& ctx);

/// Case 4: neither endpoint measured. Walks up to the nearest measured
/// ancestor, runs the case-3 procedure on the head line of the unobserved
/// region, and assigns Z/N to every line of that region (the head line
/// included), N being the region's line count. Throws NoMeasuredAncestor
/// when the walk reaches the root unmeasured.
std::vector<ImpedanceEstimate> estimate_case4(const Line& line, Phase phase,
                                              const GridTopology& t,
                                              const EstimationContext& ctx);

/// Full pipeline: decompose, then dispatch every (line, phase) to its case
/// estimator in dependency order (cases 1-2, then 3, then 4). Per-line
/// failures become Undetermined entries with a reason code; the run never
/// aborts for one bad line.
std::vector<ImpedanceEstimate> estimate_all(
    const GridTopology& t, const SeriesSource& series,
    const FeasibleVoltageBand& band, const EstimationConfig& config = {});

/// Cable inductance per meter from the IEC-style handbook formula
/// (K + 0.2 ln(2S/d)) * 1e-6, with S and d in mm. Used to build benchmark
/// impedances. Throws NonPositiveGeometry.
double cable_inductance(double k_formation, double s_axial_mm,
                        double d_conductor_mm);

}  // namespace gridest
