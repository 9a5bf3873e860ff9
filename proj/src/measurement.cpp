#include "gridest/measurement.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

namespace gridest {

namespace {

double sign_of(double x) { return (x > 0.0) - (x < 0.0); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool parse_int_field(std::string_view s, int& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  // Plain epoch seconds.
  {
    std::int64_t epoch = 0;
    auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), epoch);
    if (ec == std::errc() && ptr == text.data() + text.size()) return epoch;
  }
  // ISO-8601: YYYY-MM-DD[T ]HH:MM:SS with optional fraction and 'Z'.
  if (text.size() < 19) return std::nullopt;
  if (text[4] != '-' || text[7] != '-' ||
      (text[10] != 'T' && text[10] != ' ') || text[13] != ':' ||
      text[16] != ':') {
    return std::nullopt;
  }
  int year, month, day, hour, minute, second;
  if (!parse_int_field(text.substr(0, 4), year) ||
      !parse_int_field(text.substr(5, 2), month) ||
      !parse_int_field(text.substr(8, 2), day) ||
      !parse_int_field(text.substr(11, 2), hour) ||
      !parse_int_field(text.substr(14, 2), minute) ||
      !parse_int_field(text.substr(17, 2), second)) {
    return std::nullopt;
  }
  std::string_view rest = text.substr(19);
  if (!rest.empty() && rest.front() == '.') {
    rest.remove_prefix(1);
    while (!rest.empty() && std::isdigit(static_cast<unsigned char>(rest.front()))) {
      rest.remove_prefix(1);
    }
  }
  if (!rest.empty() && rest != "Z") return std::nullopt;
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 ||
      minute > 59 || second > 60) {
    return std::nullopt;
  }
  return days_from_civil(year, static_cast<unsigned>(month),
                         static_cast<unsigned>(day)) *
             86400 +
         hour * 3600 + minute * 60 + second;
}

double compute_phi(double p, double q) {
  if (p == 0.0 && q == 0.0) {
    throw DataError(DataErrc::ZeroApparentPower,
                    "power factor angle undefined for p = q = 0");
  }
  if (p == 0.0) return q > 0.0 ? M_PI_2 : -M_PI_2;
  // atan(q/p): magnitude acos(|p|/|S|), sign of q taken relative to the
  // flow direction so the angle is the same seen from either end.
  return std::atan(q / p);
}

double compute_current(double p, double q, double v) {
  if (v <= 0.0) {
    throw DataError(DataErrc::NonPositiveVoltage,
                    "voltage must be positive to derive current");
  }
  return sign_of(-p) * std::hypot(p, q) / v;
}

namespace {

struct MomentAccumulator {
  long n = 0;
  long n_phi = 0;
  double sum_v = 0, sum_v2 = 0, sum_i = 0, sum_i2 = 0;
  double sum_p = 0, sum_q = 0, sum_phi = 0;

  void push(double v, double p, double q) {
    if (v <= 0.0) return;
    double i = sign_of(-p) * std::hypot(p, q) / v;
    ++n;
    sum_v += v;
    sum_v2 += v * v;
    sum_i += i;
    sum_i2 += i * i;
    sum_p += p;
    sum_q += q;
    if (p != 0.0 || q != 0.0) {
      ++n_phi;
      sum_phi += compute_phi(p, q);
    }
  }

  PhaseMoments finish() const {
    if (n == 0) {
      throw DataError(DataErrc::InsufficientData,
                      "no usable samples for moment computation");
    }
    PhaseMoments m;
    m.n_samples = n;
    m.mean_v = sum_v / n;
    m.mean_v_sq = sum_v2 / n;
    m.mean_i = sum_i / n;
    m.mean_i_sq = sum_i2 / n;
    m.mean_p = sum_p / n;
    m.mean_q = sum_q / n;
    m.mean_phi = n_phi > 0 ? sum_phi / n_phi : 0.0;
    return m;
  }
};

}  // namespace

PhaseMoments moments(const MeasurementSeries& series_v,
                     const MeasurementSeries& series_pq) {
  MomentAccumulator acc;
  if (&series_v == &series_pq) {
    for (const auto& s : series_v.samples) {
      if (s.complete()) acc.push(*s.v, *s.p, *s.q);
    }
    return acc.finish();
  }
  // Align the two channels on equal timestamps.
  std::size_t a = 0, b = 0;
  while (a < series_v.samples.size() && b < series_pq.samples.size()) {
    const auto& sv = series_v.samples[a];
    const auto& spq = series_pq.samples[b];
    if (sv.timestamp < spq.timestamp) {
      ++a;
    } else if (sv.timestamp > spq.timestamp) {
      ++b;
    } else {
      if (sv.v && spq.p && spq.q) acc.push(*sv.v, *spq.p, *spq.q);
      ++a;
      ++b;
    }
  }
  return acc.finish();
}

PhaseMoments moments(const MeasurementSeries& series) {
  return moments(series, series);
}

namespace {

enum class FieldParse { Value, Missing, Malformed };

FieldParse parse_value_field(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return FieldParse::Missing;
  std::string low = lower(s);
  if (low == "nan") return FieldParse::Missing;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(out)) {
    return FieldParse::Malformed;
  }
  return FieldParse::Value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

IngestResult ingest_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) {
    throw DataError(DataErrc::UnreadableStream,
                    "measurement stream is empty or unreadable");
  }
  if (lower(trim(header)) != "timestamp,node,phase,p_w,q_var,v_v") {
    throw DataError(DataErrc::UnreadableStream,
                    "unexpected measurement CSV header: " + header);
  }

  IngestResult result;
  auto& report = result.report;
  std::map<std::pair<NodeId, Phase>, std::vector<MeasurementSample>> rows;

  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++report.rows_read;
    auto fields = split_csv(line);
    if (fields.size() != 6) {
      ++report.rows_skipped;
      continue;
    }
    auto ts = parse_timestamp(fields[0]);
    NodeId node{trim(fields[1])};
    auto phase = phase_from_string(trim(fields[2]));
    if (!ts || node.empty() || !phase) {
      ++report.rows_skipped;
      continue;
    }
    MeasurementSample sample;
    sample.timestamp = *ts;
    double value = 0.0;
    bool malformed = false;
    long miss_p = 0, miss_q = 0, miss_v = 0;
    switch (parse_value_field(fields[3], value)) {
      case FieldParse::Value: sample.p = value; break;
      case FieldParse::Missing: miss_p = 1; break;
      case FieldParse::Malformed: malformed = true; break;
    }
    switch (parse_value_field(fields[4], value)) {
      case FieldParse::Value: sample.q = value; break;
      case FieldParse::Missing: miss_q = 1; break;
      case FieldParse::Malformed: malformed = true; break;
    }
    switch (parse_value_field(fields[5], value)) {
      case FieldParse::Value:
        if (value > 0.0) {
          sample.v = value;
        } else {
          miss_v = 1;  // non-positive voltage cannot be a real reading
        }
        break;
      case FieldParse::Missing: miss_v = 1; break;
      case FieldParse::Malformed: malformed = true; break;
    }
    if (malformed) {
      ++report.rows_skipped;
      continue;
    }
    report.missing_p += miss_p;
    report.missing_q += miss_q;
    report.missing_v += miss_v;
    rows[{node, *phase}].push_back(sample);
  }

  for (auto& [key, samples] : rows) {
    std::stable_sort(samples.begin(), samples.end(),
                     [](const MeasurementSample& a, const MeasurementSample& b) {
                       return a.timestamp < b.timestamp;
                     });
    MeasurementSeries series;
    series.node = key.first;
    series.phase = key.second;
    series.samples.reserve(samples.size());
    for (const auto& s : samples) {
      if (!series.samples.empty() &&
          series.samples.back().timestamp == s.timestamp) {
        ++report.duplicates;
        ++report.rows_skipped;
        continue;
      }
      series.samples.push_back(s);
    }
    result.series.push_back(std::move(series));
  }

  if (result.series.empty()) {
    throw DataError(DataErrc::EmptyInput, "no valid measurement rows");
  }
  return result;
}

IngestResult ingest_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError(DataErrc::UnreadableStream,
                    "cannot open measurement file " + path);
  }
  return ingest_csv(in);
}

MeasurementSet::MeasurementSet(std::vector<MeasurementSeries> series) {
  for (auto& s : series) add(std::move(s));
}

void MeasurementSet::add(MeasurementSeries s) {
  auto key = std::make_pair(s.node, s.phase);
  by_channel_[key] = std::move(s);
}

const MeasurementSeries* MeasurementSet::series(const NodeId& node,
                                                Phase phase) const {
  auto it = by_channel_.find({node, phase});
  return it == by_channel_.end() ? nullptr : &it->second;
}

std::size_t MeasurementSet::min_samples() const {
  std::size_t out = 0;
  bool first = true;
  for (const auto& [_, s] : by_channel_) {
    if (first || s.samples.size() < out) out = s.samples.size();
    first = false;
  }
  return first ? 0 : out;
}

MeasurementSet MeasurementSet::prefix(std::size_t n) const {
  MeasurementSet out;
  for (const auto& [key, s] : by_channel_) {
    MeasurementSeries cut;
    cut.node = s.node;
    cut.phase = s.phase;
    cut.samples.assign(s.samples.begin(),
                       s.samples.begin() +
                           std::min(n, s.samples.size()));
    out.add(std::move(cut));
  }
  return out;
}

MeasurementSet MeasurementSet::random_subsample(std::size_t n,
                                                std::uint64_t seed) const {
  MeasurementSet out;
  for (const auto& [key, s] : by_channel_) {
    MeasurementSeries cut;
    cut.node = s.node;
    cut.phase = s.phase;
    if (n >= s.samples.size()) {
      cut.samples = s.samples;
    } else {
      // Floyd's sampling over indices, then time order restored.
      std::uint64_t state = seed;
      for (char c : s.node) state = state * 1099511628211ULL + c;
      state += static_cast<std::uint64_t>(s.phase) + 0x9e3779b97f4a7c15ULL;
      std::vector<std::size_t> idx;
      std::set<std::size_t> chosen;
      const std::size_t total = s.samples.size();
      for (std::size_t j = total - n; j < total; ++j) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        std::size_t t = static_cast<std::size_t>((state >> 16) % (j + 1));
        if (!chosen.insert(t).second) chosen.insert(j);
      }
      idx.assign(chosen.begin(), chosen.end());
      cut.samples.reserve(idx.size());
      for (std::size_t i : idx) cut.samples.push_back(s.samples[i]);
    }
    out.add(std::move(cut));
  }
  return out;
}

}  // namespace gridest
