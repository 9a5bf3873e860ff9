#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridest/decomposer.hpp"
#include "gridest/estimator.hpp"
#include "gridest/types.hpp"

namespace gridest {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

void write_classification_csv(const std::vector<LineClassification>& rows,
                              std::ostream& out);
void write_classification_text(const std::vector<LineClassification>& rows,
                               std::ostream& out);

/// Estimate report, columns
/// line_id,phase,case,quality,z_ohm,delta_rad,z_lower,z_upper,n_samples,reason
void write_estimates_csv(const std::vector<ImpedanceEstimate>& rows,
                         std::ostream& out);
std::vector<ImpedanceEstimate> read_estimates_csv(std::istream& in);

/// JSON variant with identical fields.
void write_estimates_json(const std::vector<ImpedanceEstimate>& rows,
                          std::ostream& out);
std::vector<ImpedanceEstimate> read_estimates_json(std::istream& in);

/// Reference impedance per (line, phase). Loaded either from a ground-truth
/// file (line_id,phase,z_ohm,delta_rad) or from a catalog benchmark file
/// (line_id,r_ohm_per_km,l_h_per_km,length_km; same value for all phases).
class ReferenceTable {
 public:
  struct Value {
    double z_mag = 0.0;
    double delta = 0.0;
  };

  void put(const std::string& line_id, Phase ph, Value v);
  const Value* find(const std::string& line_id, Phase ph) const;
  bool empty() const { return values_.empty(); }

  static ReferenceTable from_ground_truth_csv(std::istream& in);
  static ReferenceTable from_benchmark_csv(std::istream& in,
                                           double frequency_hz);

 private:
  std::map<std::pair<std::string, Phase>, Value> values_;
};

struct ComparisonRow {
  ImpedanceEstimate estimate;
  double z_bench = 0.0;
  double delta_bench = 0.0;
  std::optional<double> err_pct;        // 100*|z-z_bench|/z_bench
  std::optional<double> err_delta_deg;  // |delta-delta_bench| in degrees
};

/// Headline statistics cover the benchmark-comparable rows (exact and
/// bounded qualities); equivalent-load and shared rows lump unmetered loads
/// into the impedance and are only counted.
struct ComparisonSummary {
  long compared = 0;
  long equivalent_rows = 0;
  long undetermined_rows = 0;
  double mean_err_pct = 0.0;
  double median_err_pct = 0.0;
  double max_err_pct = 0.0;
  double mean_err_delta_deg = 0.0;
  double median_err_delta_deg = 0.0;
  double max_err_delta_deg = 0.0;
};

std::vector<ComparisonRow> compare_estimates(
    const std::vector<ImpedanceEstimate>& rows, const ReferenceTable& ref);
ComparisonSummary summarize_comparison(const std::vector<ComparisonRow>& rows);

/// Estimate columns plus z_bench,delta_bench,err_pct,err_delta_deg.
void write_comparison_csv(const std::vector<ComparisonRow>& rows,
                          std::ostream& out);
void write_comparison_summary(const ComparisonSummary& s, std::ostream& out);

struct SensitivityRow {
  long n_samples = 0;
  std::string line_id;
  Phase phase = Phase::A;
  std::optional<double> err_pct;
  std::optional<double> err_delta_deg;
};

/// Plot-ready CSV: n_samples,line_id,phase,err_pct,err_delta_deg.
void write_sensitivity_csv(const std::vector<SensitivityRow>& rows,
                           std::ostream& out);

/// Per-line spread of the magnitude estimate across phases, an imbalance
/// indicator: 100 * (max - min) / mean over the phases that produced a
/// value. Lines with fewer than two phase values are skipped.
void write_phase_spread_summary(const std::vector<ImpedanceEstimate>& rows,
                                std::ostream& out);

double median(std::vector<double> values);

}  // namespace gridest
