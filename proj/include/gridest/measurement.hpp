#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "gridest/errors.hpp"
#include "gridest/types.hpp"

namespace gridest {

// Sign convention, applied everywhere measurements appear: p and q in a
// sensor row are the powers received at the measured node along its parent
// line, NEGATIVE when the node consumes. With that convention the signed
// current sign(-p)*|S|/v is positive toward a consuming node, and a Case-1
// magnitude estimate (E[Vi]-E[Vj])/E[I] comes out positive for an ordinary
// load. Meters wired the other way around must be negated at ingest time.

/// One sensor row. Any of p/q/v may be individually missing.
struct MeasurementSample {
  std::int64_t timestamp = 0;  // seconds since epoch
  std::optional<double> p;     // W
  std::optional<double> q;     // var
  std::optional<double> v;     // V, > 0 when present

  bool complete() const { return p && q && v; }
};

/// Time-ordered samples for one (node, phase) channel. Timestamps are
/// strictly increasing; immutable after ingest.
struct MeasurementSeries {
  NodeId node;
  Phase phase = Phase::A;
  std::vector<MeasurementSample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

/// Moment statistics of one channel, taken over complete samples only.
struct PhaseMoments {
  double mean_v = 0.0;     // V
  double mean_v_sq = 0.0;  // V^2
  double mean_i = 0.0;     // A, signed (positive toward a consuming node)
  double mean_i_sq = 0.0;  // A^2
  double mean_phi = 0.0;   // rad, power-factor angle in [-pi/2, pi/2]
  double mean_p = 0.0;     // W, in the received-power sign convention
  double mean_q = 0.0;     // var
  long n_samples = 0;
};

/// Power-factor angle from a (p, q) pair, in [-pi/2, pi/2]. The magnitude is
/// acos(|p|/sqrt(p^2+q^2)); the sign is that of q relative to the direction
/// of flow (equivalently atan(q/p)), so an inductive load yields a positive
/// angle regardless of which way the meter counts. Throws ZeroApparentPower
/// for (0, 0).
double compute_phi(double p, double q);

/// Signed current magnitude sign(-p)*sqrt(p^2+q^2)/v. Throws
/// NonPositiveVoltage when v <= 0.
double compute_current(double p, double q, double v);

/// Sample means of V, I, phi, I^2 over the samples where every input is
/// present. When the two series differ, they are first aligned on equal
/// timestamps (v taken from series_v; p, q from series_pq). No interpolation
/// of missing values. Throws InsufficientData when nothing usable remains.
PhaseMoments moments(const MeasurementSeries& series_v,
                     const MeasurementSeries& series_pq);
PhaseMoments moments(const MeasurementSeries& series);

struct IngestReport {
  long rows_read = 0;     // data rows seen (header excluded)
  long rows_skipped = 0;  // malformed + duplicate rows
  long duplicates = 0;    // subset of rows_skipped
  long missing_p = 0;
  long missing_q = 0;
  long missing_v = 0;
};

struct IngestResult {
  std::vector<MeasurementSeries> series;  // sorted by (node, phase)
  IngestReport report;
};

/// Parses the measurement CSV (header `timestamp,node,phase,p_w,q_var,v_v`;
/// ISO-8601 or epoch-second timestamps; empty field or NaN means missing).
/// Rows are grouped by (node, phase) and sorted by time; malformed rows are
/// skipped and counted; on duplicate (node, phase, timestamp) the first row
/// wins. Throws UnreadableStream on a bad stream or header, EmptyInput when
/// no valid row survives.
IngestResult ingest_csv(std::istream& in);
IngestResult ingest_csv_file(const std::string& path);

/// Pull interface the estimators consume: one series per (node, phase),
/// possibly materialized on demand. Returning nullptr means the channel has
/// no data.
class SeriesSource {
 public:
  virtual ~SeriesSource() = default;
  virtual const MeasurementSeries* series(const NodeId& node,
                                          Phase phase) const = 0;
};

/// Owning in-memory collection of series.
class MeasurementSet : public SeriesSource {
 public:
  MeasurementSet() = default;
  explicit MeasurementSet(std::vector<MeasurementSeries> series);

  void add(MeasurementSeries s);
  const MeasurementSeries* series(const NodeId& node,
                                  Phase phase) const override;
  std::size_t channel_count() const { return by_channel_.size(); }

  /// Smallest sample count over all channels (0 when empty).
  std::size_t min_samples() const;

  /// Copy restricted to the first n samples of every channel.
  MeasurementSet prefix(std::size_t n) const;

  /// Copy with n samples drawn uniformly (without replacement, time order
  /// kept) from every channel.
  MeasurementSet random_subsample(std::size_t n, std::uint64_t seed) const;

  const std::map<std::pair<NodeId, Phase>, MeasurementSeries>& channels()
      const {
    return by_channel_;
  }

 private:
  std::map<std::pair<NodeId, Phase>, MeasurementSeries> by_channel_;
};

/// Timestamp helpers shared by ingest and the sensor emulator.
std::optional<std::int64_t> parse_timestamp(std::string_view text);

}  // namespace gridest
