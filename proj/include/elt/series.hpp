#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "elt/interval.hpp"

namespace elt {

/// Multivariate time series with named channels. Column-major storage:
/// values[c][t]. Immutable after construction; all cells are finite and
/// T >= 2. The per-channel robust scale (interquartile range, floored at
/// 1e-9) is computed once at construction so feature extraction stays cheap.
class SeriesFrame {
 public:
  SeriesFrame(std::vector<std::string> channels, std::vector<std::vector<double>> values,
              double sample_period = 1.0);

  std::int64_t length() const { return length_; }
  std::size_t channel_count() const { return channels_.size(); }
  double sample_period() const { return sample_period_; }

  const std::vector<std::string>& channels() const { return channels_; }
  bool has_channel(const std::string& name) const;
  std::size_t channel_index(const std::string& name) const;  // throws UnknownChannel
  const std::vector<double>& channel(const std::string& name) const;
  const std::vector<double>& channel(std::size_t index) const { return values_[index]; }

  /// Interquartile range of the full channel, floored at 1e-9.
  double robust_scale(std::size_t index) const { return scales_[index]; }
  double robust_scale(const std::string& name) const;

  /// Sub-frame over [window.on, window.off). Scales are recomputed for the
  /// slice so sliced frames behave like standalone frames.
  SeriesFrame slice(const Interval& window) const;

 private:
  std::vector<std::string> channels_;
  std::vector<std::vector<double>> values_;
  std::vector<double> scales_;
  std::int64_t length_ = 0;
  double sample_period_ = 1.0;
};

struct GroundTruthEvent {
  Interval interval;
  std::string event_type;
};

struct CsvOptions {
  char delimiter = ',';
  double sample_period = 1.0;
};

/// Reads the named columns from a delimited text file with a header row.
/// Any non-numeric or non-finite cell in a selected column is an error;
/// unselected columns (e.g. a timestamp column) are ignored.
SeriesFrame load_csv(const std::string& path, const std::vector<std::string>& channel_spec,
                     const CsvOptions& options = {});

/// Same as load_csv but over in-memory text.
SeriesFrame load_csv_text(const std::string& text, const std::vector<std::string>& channel_spec,
                          const CsvOptions& options = {});

void write_csv(const std::string& path, const SeriesFrame& frame);

}  // namespace elt
