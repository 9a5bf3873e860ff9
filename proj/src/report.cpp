#include "gridest/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace gridest {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::optional<double> parse_opt(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') {
    out.back().pop_back();
  }
  return out;
}

EstimateQuality quality_from_string(const std::string& s) {
  if (s == "exact") return EstimateQuality::Exact;
  if (s == "bounded") return EstimateQuality::Bounded;
  if (s == "equivalent_load") return EstimateQuality::EquivalentLoad;
  if (s == "shared") return EstimateQuality::Shared;
  return EstimateQuality::Undetermined;
}

EstimateReason reason_from_string(const std::string& s) {
  if (s == "zero_mean_current") return EstimateReason::ZeroMeanCurrent;
  if (s == "insufficient_data") return EstimateReason::InsufficientData;
  if (s == "window_overlap_too_small") return EstimateReason::WindowOverlapTooSmall;
  if (s == "zero_residual_power") return EstimateReason::ZeroResidualPower;
  if (s == "no_measured_ancestor") return EstimateReason::NoMeasuredAncestor;
  if (s == "missing_series") return EstimateReason::MissingSeries;
  if (s == "sign_convention_suspect") return EstimateReason::SignConventionSuspect;
  return EstimateReason::None;
}

LineCase case_from_int(int c) {
  switch (c) {
    case 1: return LineCase::Case1;
    case 2: return LineCase::Case2;
    case 3: return LineCase::Case3;
    default: return LineCase::Case4;
  }
}

}  // namespace

void write_classification_csv(const std::vector<LineClassification>& rows,
                              std::ostream& out) {
  out << "line_id,from,to,case\n";
  for (const auto& r : rows) {
    out << r.line.line_id << ',' << r.line.parent << ',' << r.line.child << ','
        << to_string(r.line_case) << '\n';
  }
}

void write_classification_text(const std::vector<LineClassification>& rows,
                               std::ostream& out) {
  CaseMix mix = case_mix(rows);
  out << "line decomposition (" << rows.size() << " lines): case1=" << mix.case1
      << " case2=" << mix.case2 << " case3=" << mix.case3
      << " case4=" << mix.case4 << "\n";
  for (const auto& r : rows) {
    out << "  " << r.line.line_id << "  " << r.line.parent << " -> "
        << r.line.child << "  case " << to_string(r.line_case) << "\n";
  }
}

void write_estimates_csv(const std::vector<ImpedanceEstimate>& rows,
                         std::ostream& out) {
  out << "line_id,phase,case,quality,z_ohm,delta_rad,z_lower,z_upper,"
         "n_samples,reason\n";
  for (const auto& e : rows) {
    out << e.line_id << ',' << to_string(e.phase) << ','
        << to_string(e.line_case) << ',' << to_string(e.quality) << ','
        << opt_field(e.z_mag) << ',' << opt_field(e.delta) << ','
        << opt_field(e.z_lower) << ',' << opt_field(e.z_upper) << ','
        << e.n_samples_used << ',' << to_string(e.reason) << '\n';
  }
}

std::vector<ImpedanceEstimate> read_estimates_csv(std::istream& in) {
  std::vector<ImpedanceEstimate> out;
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(DataErrc::UnreadableStream, "empty estimate report");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 10) {
      throw DataError(DataErrc::UnreadableStream,
                      "bad estimate report row: " + line);
    }
    ImpedanceEstimate e;
    e.line_id = f[0];
    auto ph = phase_from_string(f[1]);
    if (!ph) {
      throw DataError(DataErrc::UnreadableStream, "bad phase: " + f[1]);
    }
    e.phase = *ph;
    e.line_case = case_from_int(std::stoi(f[2]));
    e.quality = quality_from_string(f[3]);
    e.z_mag = parse_opt(f[4]);
    e.delta = parse_opt(f[5]);
    e.z_lower = parse_opt(f[6]);
    e.z_upper = parse_opt(f[7]);
    e.n_samples_used = std::stol(f[8]);
    e.reason = reason_from_string(f[9]);
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

nlohmann::json estimate_to_json(const ImpedanceEstimate& e) {
  nlohmann::json j;
  j["line_id"] = e.line_id;
  j["phase"] = to_string(e.phase);
  j["case"] = static_cast<int>(e.line_case);
  j["quality"] = to_string(e.quality);
  if (e.z_mag) j["z_ohm"] = *e.z_mag;
  if (e.delta) j["delta_rad"] = *e.delta;
  if (e.z_lower) j["z_lower"] = *e.z_lower;
  if (e.z_upper) {
    if (std::isinf(*e.z_upper)) {
      j["z_upper"] = "inf";
    } else {
      j["z_upper"] = *e.z_upper;
    }
  }
  j["n_samples"] = e.n_samples_used;
  j["reason"] = to_string(e.reason);
  return j;
}

}  // namespace

void write_estimates_json(const std::vector<ImpedanceEstimate>& rows,
                          std::ostream& out) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& e : rows) doc.push_back(estimate_to_json(e));
  out << doc.dump(2) << "\n";
}

std::vector<ImpedanceEstimate> read_estimates_json(std::istream& in) {
  nlohmann::json doc;
  in >> doc;
  std::vector<ImpedanceEstimate> out;
  for (const auto& j : doc) {
    ImpedanceEstimate e;
    e.line_id = j.at("line_id").get<std::string>();
    e.phase = *phase_from_string(j.at("phase").get<std::string>());
    e.line_case = case_from_int(j.at("case").get<int>());
    e.quality = quality_from_string(j.at("quality").get<std::string>());
    if (j.contains("z_ohm")) e.z_mag = j.at("z_ohm").get<double>();
    if (j.contains("delta_rad")) e.delta = j.at("delta_rad").get<double>();
    if (j.contains("z_lower")) e.z_lower = j.at("z_lower").get<double>();
    if (j.contains("z_upper")) {
      if (j.at("z_upper").is_string()) {
        e.z_upper = std::numeric_limits<double>::infinity();
      } else {
        e.z_upper = j.at("z_upper").get<double>();
      }
    }
    e.n_samples_used = j.at("n_samples").get<long>();
    e.reason = reason_from_string(j.at("reason").get<std::string>());
    out.push_back(std::move(e));
  }
  return out;
}

void ReferenceTable::put(const std::string& line_id, Phase ph, Value v) {
  values_[{line_id, ph}] = v;
}

const ReferenceTable::Value* ReferenceTable::find(const std::string& line_id,
                                                  Phase ph) const {
  auto it = values_.find({line_id, ph});
  return it == values_.end() ? nullptr : &it->second;
}

ReferenceTable ReferenceTable::from_ground_truth_csv(std::istream& in) {
  ReferenceTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(DataErrc::UnreadableStream, "empty ground-truth file");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 4) {
      throw DataError(DataErrc::UnreadableStream,
                      "bad ground-truth row: " + line);
    }
    auto ph = phase_from_string(f[1]);
    auto z = parse_opt(f[2]);
    auto d = parse_opt(f[3]);
    if (!ph || !z || !d) {
      throw DataError(DataErrc::UnreadableStream,
                      "bad ground-truth row: " + line);
    }
    table.put(f[0], *ph, Value{*z, *d});
  }
  return table;
}

ReferenceTable ReferenceTable::from_benchmark_csv(std::istream& in,
                                                  double frequency_hz) {
  ReferenceTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(DataErrc::UnreadableStream, "empty benchmark file");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 4) {
      throw DataError(DataErrc::UnreadableStream, "bad benchmark row: " + line);
    }
    auto r_km = parse_opt(f[1]);
    auto l_km = parse_opt(f[2]);
    auto len = parse_opt(f[3]);
    if (!r_km || !l_km || !len) {
      throw DataError(DataErrc::UnreadableStream, "bad benchmark row: " + line);
    }
    double x_km = 2.0 * M_PI * frequency_hz * *l_km;
    Value v{*len * std::hypot(*r_km, x_km), std::atan2(x_km, *r_km)};
    for (Phase ph : kAllPhases) table.put(f[0], ph, v);
  }
  return table;
}

std::vector<ComparisonRow> compare_estimates(
    const std::vector<ImpedanceEstimate>& rows, const ReferenceTable& ref) {
  std::vector<ComparisonRow> out;
  for (const auto& e : rows) {
    const ReferenceTable::Value* v = ref.find(e.line_id, e.phase);
    if (v == nullptr) continue;
    ComparisonRow row;
    row.estimate = e;
    row.z_bench = v->z_mag;
    row.delta_bench = v->delta;
    if (e.z_mag && v->z_mag > 0.0) {
      row.err_pct = 100.0 * std::abs(std::abs(*e.z_mag) - v->z_mag) / v->z_mag;
    }
    if (e.delta) {
      row.err_delta_deg = std::abs(*e.delta - v->delta) * 180.0 / M_PI;
    }
    out.push_back(std::move(row));
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

ComparisonSummary summarize_comparison(const std::vector<ComparisonRow>& rows) {
  ComparisonSummary s;
  std::vector<double> z_errs, d_errs;
  for (const auto& r : rows) {
    switch (r.estimate.quality) {
      case EstimateQuality::Exact:
      case EstimateQuality::Bounded:
        if (r.err_pct) z_errs.push_back(*r.err_pct);
        if (r.err_delta_deg) d_errs.push_back(*r.err_delta_deg);
        break;
      case EstimateQuality::EquivalentLoad:
      case EstimateQuality::Shared:
        ++s.equivalent_rows;
        break;
      case EstimateQuality::Undetermined:
        ++s.undetermined_rows;
        break;
    }
  }
  s.compared = static_cast<long>(z_errs.size());
  if (!z_errs.empty()) {
    s.mean_err_pct = 0.0;
    for (double v : z_errs) s.mean_err_pct += v;
    s.mean_err_pct /= static_cast<double>(z_errs.size());
    s.median_err_pct = median(z_errs);
    s.max_err_pct = *std::max_element(z_errs.begin(), z_errs.end());
  }
  if (!d_errs.empty()) {
    s.mean_err_delta_deg = 0.0;
    for (double v : d_errs) s.mean_err_delta_deg += v;
    s.mean_err_delta_deg /= static_cast<double>(d_errs.size());
    s.median_err_delta_deg = median(d_errs);
    s.max_err_delta_deg = *std::max_element(d_errs.begin(), d_errs.end());
  }
  return s;
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows,
                          std::ostream& out) {
  out << "line_id,phase,case,quality,z_ohm,delta_rad,z_lower,z_upper,"
         "n_samples,reason,z_bench,delta_bench,err_pct,err_delta_deg\n";
  for (const auto& r : rows) {
    const auto& e = r.estimate;
    out << e.line_id << ',' << to_string(e.phase) << ','
        << to_string(e.line_case) << ',' << to_string(e.quality) << ','
        << opt_field(e.z_mag) << ',' << opt_field(e.delta) << ','
        << opt_field(e.z_lower) << ',' << opt_field(e.z_upper) << ','
        << e.n_samples_used << ',' << to_string(e.reason) << ','
        << format_double(r.z_bench) << ',' << format_double(r.delta_bench)
        << ',' << opt_field(r.err_pct) << ',' << opt_field(r.err_delta_deg)
        << '\n';
  }
}

void write_comparison_summary(const ComparisonSummary& s, std::ostream& out) {
  out << "compared " << s.compared
      << " exact/bounded (line, phase) estimates against the reference\n"
      << "magnitude error %: mean " << format_double(s.mean_err_pct)
      << ", median " << format_double(s.median_err_pct) << ", max "
      << format_double(s.max_err_pct) << "\n"
      << "angle error deg: mean " << format_double(s.mean_err_delta_deg)
      << ", median " << format_double(s.median_err_delta_deg) << ", max "
      << format_double(s.max_err_delta_deg) << "\n";
  if (s.equivalent_rows > 0) {
    out << s.equivalent_rows
        << " equivalent-load/shared rows are in the CSV but excluded from "
           "the statistics (they lump unmetered loads)\n";
  }
  if (s.undetermined_rows > 0) {
    out << s.undetermined_rows << " rows undetermined\n";
  }
}

void write_phase_spread_summary(const std::vector<ImpedanceEstimate>& rows,
                                std::ostream& out) {
  std::map<std::string, std::vector<double>> by_line;
  for (const auto& e : rows) {
    if (e.z_mag) by_line[e.line_id].push_back(std::abs(*e.z_mag));
  }
  std::vector<double> spreads;
  for (const auto& [line_id, values] : by_line) {
    if (values.size() < 2) continue;
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (mean > 0.0) spreads.push_back(100.0 * (hi - lo) / mean);
  }
  if (spreads.empty()) {
    out << "phase spread: no line has estimates on two or more phases\n";
    return;
  }
  out << "phase spread of |Z| across phases (imbalance indicator): median "
      << format_double(median(spreads)) << "%, max "
      << format_double(*std::max_element(spreads.begin(), spreads.end()))
      << "% over " << spreads.size() << " lines\n";
}

void write_sensitivity_csv(const std::vector<SensitivityRow>& rows,
                           std::ostream& out) {
  out << "n_samples,line_id,phase,err_pct,err_delta_deg\n";
  for (const auto& r : rows) {
    out << r.n_samples << ',' << r.line_id << ',' << to_string(r.phase) << ','
        << opt_field(r.err_pct) << ',' << opt_field(r.err_delta_deg) << '\n';
  }
}

}  // namespace gridest
