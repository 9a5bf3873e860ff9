#include "gridest/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace gridest {

FeasibleVoltageBand make_band(double v_nominal, double lo_factor,
                              double hi_factor) {
  FeasibleVoltageBand band;
  band.v_nominal = v_nominal;
  band.v_min = lo_factor * v_nominal;
  band.v_max = hi_factor * v_nominal;
  return band;
}

const char* to_string(EstimateQuality q) {
  switch (q) {
    case EstimateQuality::Exact: return "exact";
    case EstimateQuality::Bounded: return "bounded";
    case EstimateQuality::EquivalentLoad: return "equivalent_load";
    case EstimateQuality::Shared: return "shared";
    case EstimateQuality::Undetermined: return "undetermined";
  }
  return "?";
}

const char* to_string(EstimateReason r) {
  switch (r) {
    case EstimateReason::None: return "";
    case EstimateReason::ZeroMeanCurrent: return "zero_mean_current";
    case EstimateReason::InsufficientData: return "insufficient_data";
    case EstimateReason::WindowOverlapTooSmall: return "window_overlap_too_small";
    case EstimateReason::ZeroResidualPower: return "zero_residual_power";
    case EstimateReason::NoMeasuredAncestor: return "no_measured_ancestor";
    case EstimateReason::MissingSeries: return "missing_series";
    case EstimateReason::SignConventionSuspect: return "sign_convention_suspect";
  }
  return "?";
}

void EstimationContext::put_stats(const NodeId& n, Phase ph, ChannelStats s) {
  stats_[{n, ph}] = std::move(s);
}

const ChannelStats* EstimationContext::stats(const NodeId& n, Phase ph) const {
  auto it = stats_.find({n, ph});
  return it == stats_.end() ? nullptr : &it->second;
}

void EstimationContext::put_estimate(const ImpedanceEstimate& e) {
  estimates_[{e.line_id, e.phase}] = e;
}

const ImpedanceEstimate* EstimationContext::estimate(
    const std::string& line_id, Phase ph) const {
  auto it = estimates_.find({line_id, ph});
  return it == estimates_.end() ? nullptr : &it->second;
}

namespace {

ImpedanceEstimate make_entry(const Line& line, Phase phase, LineCase c) {
  ImpedanceEstimate e;
  e.line_id = line.line_id;
  e.parent = line.parent;
  e.child = line.child;
  e.phase = phase;
  e.line_case = c;
  return e;
}

}  // namespace

ImpedanceEstimate estimate_case1(const Line& line, Phase phase,
                                 const PhaseMoments& m_i,
                                 const PhaseMoments& m_j,
                                 EstimatorVariant variant) {
  if (m_i.n_samples < 1 || m_j.n_samples < 1) {
    throw EstimationError(EstimationErrc::InsufficientData,
                          "case 1 needs samples at both endpoints");
  }
  ImpedanceEstimate e = make_entry(line, phase, LineCase::Case1);
  e.quality = EstimateQuality::Exact;
  e.n_samples_used = std::min(m_i.n_samples, m_j.n_samples);
  e.delta = m_j.mean_phi;
  if (variant == EstimatorVariant::FirstMoment) {
    if (m_j.mean_i == 0.0) {
      throw EstimationError(EstimationErrc::ZeroMeanCurrent,
                            "mean current is zero on line " + line.line_id);
    }
    double z = (m_i.mean_v - m_j.mean_v) / m_j.mean_i;
    e.z_mag = z;
    if (z < 0.0) e.reason = EstimateReason::SignConventionSuspect;
  } else {
    if (m_j.mean_i_sq == 0.0) {
      throw EstimationError(EstimationErrc::ZeroMeanCurrent,
                            "mean squared current is zero on line " +
                                line.line_id);
    }
    // E[(Vi - Vj)^2] expanded with E[Vi*Vj] = E[Vi]E[Vj]; the two channels
    // run on independent clocks, so no joint samples exist.
    double drop_sq =
        m_i.mean_v_sq - 2.0 * m_i.mean_v * m_j.mean_v + m_j.mean_v_sq;
    e.z_mag = std::sqrt(std::max(0.0, drop_sq) / m_j.mean_i_sq);
  }
  return e;
}

ImpedanceEstimate estimate_case2(const Line& line, Phase phase,
                                 const PhaseMoments& m_j,
                                 const FeasibleVoltageBand& band) {
  if (m_j.n_samples < 1) {
    throw EstimationError(EstimationErrc::InsufficientData,
                          "case 2 needs receiving-end samples");
  }
  ImpedanceEstimate e = make_entry(line, phase, LineCase::Case2);
  e.quality = EstimateQuality::Bounded;
  e.n_samples_used = m_j.n_samples;
  e.delta = m_j.mean_phi;
  e.z_lower = 0.0;
  if (m_j.mean_i > 0.0) {
    e.z_upper = (band.v_max - m_j.mean_v) / m_j.mean_i;
  } else if (m_j.mean_i < 0.0) {
    e.z_upper = (band.v_min - m_j.mean_v) / m_j.mean_i;
  } else {
    e.z_upper = std::numeric_limits<double>::infinity();
  }
  if (*e.z_upper < 0.0) e.reason = EstimateReason::SignConventionSuspect;
  return e;
}

namespace {

// Sending-end power of a line whose child carries a sensor, expressed in
// the received-power sign convention: p_send = E[p_child] - E[I]^2 Z cos d.
// The loss term uses the line's point estimate when one exists and the
// lower bound (zero) otherwise, keeping the result a sound lower bound.
std::optional<std::pair<double, double>> sending_power(
    const Line& line, Phase ph, const EstimationContext& ctx) {
  const ChannelStats* stats = ctx.stats(line.child, ph);
  if (stats == nullptr) return std::nullopt;
  double z = 0.0;
  double d = 0.0;
  if (const ImpedanceEstimate* est = ctx.estimate(line.line_id, ph)) {
    if (est->z_mag) {
      z = *est->z_mag;
      d = est->delta.value_or(0.0);
    }
  }
  double i_sq = stats->m.mean_i * stats->m.mean_i;
  double p = stats->m.mean_p - i_sq * z * std::cos(d);
  double q = stats->m.mean_q - i_sq * z * std::sin(d);
  return std::make_pair(p, q);
}

// Sum of reconstructible sending-end powers over the child lines of x.
// Children without a sensor contribute zero.
std::pair<double, double> lower_bound_node(const NodeId& x, Phase ph,
                                           const GridTopology& t,
                                           const EstimationContext& ctx) {
  double p = 0.0, q = 0.0;
  for (const auto& m : t.children(x)) {
    const Line* line = t.parent_line(m);
    if (auto send = sending_power(*line, ph, ctx)) {
      p += send->first;
      q += send->second;
    }
  }
  return {p, q};
}

struct SiblingBound {
  double p = 0.0;
  double q = 0.0;
  int n_branch = 1;
};

// Accounts for node i's other branches: observed ones (sensor at the child)
// by their reconstructed flow, unobserved ones by joining the equal share
// and contributing their own observed grandchildren.
SiblingBound lower_bound_siblings(const NodeId& i, const NodeId& j, Phase ph,
                                  const GridTopology& t,
                                  const EstimationContext& ctx) {
  SiblingBound out;
  for (const auto& n : t.children(i)) {
    if (n == j) continue;
    const Line* line = t.parent_line(n);
    if (auto send = sending_power(*line, ph, ctx)) {
      out.p += send->first;
      out.q += send->second;
    } else {
      ++out.n_branch;
      auto [p1, q1] = lower_bound_node(n, ph, t, ctx);
      out.p += p1;
      out.q += q1;
    }
  }
  return out;
}

struct Equivalent {
  std::optional<double> raw_r;
  std::optional<double> raw_x;
  long n_samples = 0;
};

Equivalent equivalent_impedance(const Line& line, Phase ph,
                                const GridTopology& t,
                                const EstimationContext& ctx) {
  const ChannelStats* stats_i = ctx.stats(line.parent, ph);
  if (stats_i == nullptr) {
    throw EstimationError(EstimationErrc::InsufficientData,
                          "no sending-end statistics for line " +
                              line.line_id);
  }
  auto [p_j, q_j] = lower_bound_node(line.child, ph, t, ctx);
  SiblingBound sib = lower_bound_siblings(line.parent, line.child, ph, t, ctx);
  double p_res = (stats_i->m.mean_p - sib.p - p_j) / sib.n_branch;
  double q_res = (stats_i->m.mean_q - sib.q - q_j) / sib.n_branch;
  double v_sq = stats_i->m.mean_v * stats_i->m.mean_v;
  Equivalent eq;
  eq.n_samples = stats_i->m.n_samples;
  if (p_res != 0.0) eq.raw_r = v_sq / p_res;
  if (q_res != 0.0) eq.raw_x = v_sq / q_res;
  return eq;
}

}  // namespace

ImpedanceEstimate estimate_case3(const Line& line, Phase phase,
                                 const GridTopology& t,
                                 const EstimationContext& ctx) {
  Equivalent eq = equivalent_impedance(line, phase, t, ctx);
  ImpedanceEstimate e = make_entry(line, phase, LineCase::Case3);
  e.n_samples_used = eq.n_samples;
  e.raw_r = eq.raw_r;
  e.raw_x = eq.raw_x;
  if (!eq.raw_r || !eq.raw_x) {
    e.quality = EstimateQuality::Undetermined;
    e.reason = EstimateReason::ZeroResidualPower;
    return e;
  }
  e.quality = EstimateQuality::EquivalentLoad;
  e.z_mag = std::hypot(*eq.raw_r, *eq.raw_x);
  e.delta = std::atan(*eq.raw_x / *eq.raw_r);
  return e;
}

namespace {

// Topmost node of the unobserved region containing the child endpoint:
// every ancestor up to (excluding) the first measured one.
NodeId region_top(const Line& line, const GridTopology& t) {
  NodeId top = line.child;
  while (true) {
    const NodeId* par = t.parent(top);
    if (par == nullptr) {
      throw EstimationError(EstimationErrc::NoMeasuredAncestor,
                            "no measured ancestor above line " + line.line_id);
    }
    if (t.is_measured(*par)) return top;
    top = *par;
  }
}

// Parent lines of every node in the unobserved region rooted at `top`,
// head line first, then breadth-first.
std::vector<Line> region_lines(const NodeId& top, const GridTopology& t) {
  std::vector<Line> lines;
  std::deque<NodeId> queue{top};
  while (!queue.empty()) {
    NodeId n = queue.front();
    queue.pop_front();
    if (const Line* pl = t.parent_line(n)) lines.push_back(*pl);
    for (const auto& c : t.children(n)) {
      if (!t.is_measured(c)) queue.push_back(c);
    }
  }
  return lines;
}

}  // namespace

std::vector<ImpedanceEstimate> estimate_case4(const Line& line, Phase phase,
                                              const GridTopology& t,
                                              const EstimationContext& ctx) {
  NodeId top = region_top(line, t);
  std::vector<Line> members = region_lines(top, t);
  const Line* head = t.parent_line(top);
  Equivalent eq = equivalent_impedance(*head, phase, t, ctx);

  std::vector<ImpedanceEstimate> out;
  out.reserve(members.size());
  const double n_branch = static_cast<double>(members.size());
  for (const auto& member : members) {
    ImpedanceEstimate e = make_entry(member, phase,
                                     member.line_id == head->line_id
                                         ? LineCase::Case3
                                         : LineCase::Case4);
    e.n_samples_used = eq.n_samples;
    if (!eq.raw_r || !eq.raw_x) {
      e.quality = EstimateQuality::Undetermined;
      e.reason = EstimateReason::ZeroResidualPower;
      e.raw_r = eq.raw_r;
      e.raw_x = eq.raw_x;
    } else {
      e.quality = EstimateQuality::Shared;
      e.raw_r = *eq.raw_r / n_branch;
      e.raw_x = *eq.raw_x / n_branch;
      e.z_mag = std::hypot(*eq.raw_r, *eq.raw_x) / n_branch;
      e.delta = std::atan(*eq.raw_x / *eq.raw_r);
    }
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

EstimateReason reason_from(const EstimationError& err) {
  switch (err.code()) {
    case EstimationErrc::ZeroMeanCurrent: return EstimateReason::ZeroMeanCurrent;
    case EstimationErrc::InsufficientData: return EstimateReason::InsufficientData;
    case EstimationErrc::ZeroResidualPower: return EstimateReason::ZeroResidualPower;
    case EstimationErrc::NoMeasuredAncestor: return EstimateReason::NoMeasuredAncestor;
  }
  return EstimateReason::None;
}

ImpedanceEstimate undetermined(const Line& line, Phase phase, LineCase c,
                               EstimateReason reason) {
  ImpedanceEstimate e = make_entry(line, phase, c);
  e.quality = EstimateQuality::Undetermined;
  e.reason = reason;
  return e;
}

bool windows_overlap_enough(const ChannelStats& a, const ChannelStats& b,
                            double min_fraction) {
  double overlap = static_cast<double>(
      std::min(a.window_end, b.window_end) -
      std::max(a.window_begin, b.window_begin));
  double shorter = static_cast<double>(
      std::min(a.window_end - a.window_begin, b.window_end - b.window_begin));
  if (shorter <= 0.0) return overlap >= 0.0;
  return overlap / shorter >= min_fraction;
}

}  // namespace

std::vector<ImpedanceEstimate> estimate_all(const GridTopology& t,
                                            const SeriesSource& series,
                                            const FeasibleVoltageBand& band,
                                            const EstimationConfig& config) {
  const std::vector<LineClassification> classes = decompose(t);

  std::vector<ImpedanceEstimate> out;
  out.reserve(classes.size() * kAllPhases.size());

  for (Phase ph : kAllPhases) {
    EstimationContext ctx;
    for (const auto& n : t.measured_nodes()) {
      const MeasurementSeries* s = series.series(n, ph);
      if (s == nullptr || s->empty()) continue;
      try {
        ChannelStats cs;
        cs.m = moments(*s);
        cs.window_begin = s->samples.front().timestamp;
        cs.window_end = s->samples.back().timestamp;
        ctx.put_stats(n, ph, std::move(cs));
      } catch (const DataError&) {
        // channel unusable; lines touching it become Undetermined below
      }
    }

    std::map<std::string, ImpedanceEstimate> results;

    auto record = [&](const ImpedanceEstimate& e) {
      results[e.line_id] = e;
      ctx.put_estimate(e);
    };

    // Cases 1 and 2 first: their results feed the lower bounds below.
    for (const auto& cls : classes) {
      const Line& line = cls.line;
      if (cls.line_case == LineCase::Case1) {
        const ChannelStats* si = ctx.stats(line.parent, ph);
        const ChannelStats* sj = ctx.stats(line.child, ph);
        if (si == nullptr || sj == nullptr) {
          record(undetermined(line, ph, cls.line_case,
                              EstimateReason::MissingSeries));
          continue;
        }
        if (si->m.n_samples < config.min_samples ||
            sj->m.n_samples < config.min_samples) {
          record(undetermined(line, ph, cls.line_case,
                              EstimateReason::InsufficientData));
          continue;
        }
        if (!windows_overlap_enough(*si, *sj, config.min_window_overlap)) {
          record(undetermined(line, ph, cls.line_case,
                              EstimateReason::WindowOverlapTooSmall));
          continue;
        }
        try {
          record(estimate_case1(line, ph, si->m, sj->m, config.variant));
        } catch (const EstimationError& err) {
          record(undetermined(line, ph, cls.line_case, reason_from(err)));
        }
      } else if (cls.line_case == LineCase::Case2) {
        const ChannelStats* sj = ctx.stats(line.child, ph);
        if (sj == nullptr) {
          record(undetermined(line, ph, cls.line_case,
                              EstimateReason::MissingSeries));
          continue;
        }
        if (sj->m.n_samples < config.min_samples) {
          record(undetermined(line, ph, cls.line_case,
                              EstimateReason::InsufficientData));
          continue;
        }
        try {
          record(estimate_case2(line, ph, sj->m, band));
        } catch (const EstimationError& err) {
          record(undetermined(line, ph, cls.line_case, reason_from(err)));
        }
      }
    }

    // Cases 3 and 4: one pass per unobserved region. The classification
    // order visits the deepest lines first, so each region resolves at its
    // first member and later members are already recorded.
    for (const auto& cls : classes) {
      const Line& line = cls.line;
      if (cls.line_case != LineCase::Case3 &&
          cls.line_case != LineCase::Case4) {
        continue;
      }
      if (results.count(line.line_id)) continue;

      NodeId top;
      try {
        top = region_top(line, t);
      } catch (const EstimationError& err) {
        // Region hangs off an unmeasured root: everything below this line
        // is dark. Lines between the root and line.child are reached by
        // their own classification entries falling into this same branch.
        for (const auto& member : region_lines(line.child, t)) {
          if (!results.count(member.line_id)) {
            record(undetermined(member, ph,
                                classify_by_membership(t, member),
                                reason_from(err)));
          }
        }
        continue;
      }

      std::vector<Line> members = region_lines(top, t);
      const ChannelStats* sk = ctx.stats(*t.parent(top), ph);
      if (sk == nullptr) {
        for (const auto& member : members) {
          record(undetermined(member, ph, classify_by_membership(t, member),
                              EstimateReason::MissingSeries));
        }
        continue;
      }
      if (sk->m.n_samples < config.min_samples) {
        for (const auto& member : members) {
          record(undetermined(member, ph, classify_by_membership(t, member),
                              EstimateReason::InsufficientData));
        }
        continue;
      }
      try {
        if (members.size() == 1) {
          record(estimate_case3(members.front(), ph, t, ctx));
        } else {
          for (auto& e : estimate_case4(line, ph, t, ctx)) {
            record(e);
          }
        }
      } catch (const EstimationError& err) {
        for (const auto& member : members) {
          record(undetermined(member, ph, classify_by_membership(t, member),
                              reason_from(err)));
        }
      }
    }

    for (const auto& cls : classes) {
      auto it = results.find(cls.line.line_id);
      if (it != results.end()) {
        out.push_back(it->second);
      } else {
        out.push_back(undetermined(cls.line, ph, cls.line_case,
                                   EstimateReason::MissingSeries));
      }
    }
  }

  // Reorder line-major (classification order, phases inner) for reporting.
  std::vector<ImpedanceEstimate> ordered;
  ordered.reserve(out.size());
  const std::size_t n_lines = classes.size();
  for (std::size_t li = 0; li < n_lines; ++li) {
    for (std::size_t pi = 0; pi < kAllPhases.size(); ++pi) {
      ordered.push_back(out[pi * n_lines + li]);
    }
  }
  return ordered;
}

double cable_inductance(double k_formation, double s_axial_mm,
                        double d_conductor_mm) {
  if (s_axial_mm <= 0.0 || d_conductor_mm <= 0.0) {
    throw ScenarioError(ScenarioErrc::NonPositiveGeometry,
                        "cable geometry must be positive");
  }
  return (k_formation + 0.2 * std::log(2.0 * s_axial_mm / d_conductor_mm)) *
         1e-6;
}

}  // namespace gridest
