#include "elt/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "elt/errors.hpp"

namespace elt {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double iqr_floored(const std::vector<double>& column) {
  std::vector<double> sorted(column);
  std::sort(sorted.begin(), sorted.end());
  const double q1 = quantile_sorted(sorted, 0.25);
  const double q3 = quantile_sorted(sorted, 0.75);
  return std::max(q3 - q1, 1e-9);
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  for (char ch : line) {
    if (ch == delimiter) {
      cells.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

SeriesFrame::SeriesFrame(std::vector<std::string> channels,
                         std::vector<std::vector<double>> values, double sample_period)
    : channels_(std::move(channels)), values_(std::move(values)), sample_period_(sample_period) {
  if (channels_.empty() || channels_.size() != values_.size()) {
    raise(Errc::BadConfig, "channel names and value columns must align");
  }
  std::set<std::string> seen;
  for (const auto& name : channels_) {
    if (!seen.insert(name).second) raise(Errc::BadConfig, "duplicate channel name '" + name + "'");
  }
  length_ = static_cast<std::int64_t>(values_[0].size());
  if (length_ < 2) raise(Errc::TooShort, "series needs at least 2 samples, got " + std::to_string(length_));
  for (std::size_t c = 0; c < values_.size(); ++c) {
    if (static_cast<std::int64_t>(values_[c].size()) != length_) {
      raise(Errc::BadConfig, "ragged columns: channel '" + channels_[c] + "'");
    }
    for (double v : values_[c]) {
      if (!std::isfinite(v)) raise(Errc::NonNumericCell, "non-finite value in channel '" + channels_[c] + "'");
    }
  }
  if (!(sample_period_ > 0.0)) raise(Errc::BadConfig, "sample_period must be positive");
  scales_.reserve(values_.size());
  for (const auto& column : values_) scales_.push_back(iqr_floored(column));
}

bool SeriesFrame::has_channel(const std::string& name) const {
  return std::find(channels_.begin(), channels_.end(), name) != channels_.end();
}

std::size_t SeriesFrame::channel_index(const std::string& name) const {
  auto it = std::find(channels_.begin(), channels_.end(), name);
  if (it == channels_.end()) raise(Errc::UnknownChannel, "no channel named '" + name + "'");
  return static_cast<std::size_t>(it - channels_.begin());
}

const std::vector<double>& SeriesFrame::channel(const std::string& name) const {
  return values_[channel_index(name)];
}

double SeriesFrame::robust_scale(const std::string& name) const {
  return scales_[channel_index(name)];
}

SeriesFrame SeriesFrame::slice(const Interval& window) const {
  if (window.on < 0 || window.off > length_) {
    raise(Errc::OutOfBounds, "slice window outside series");
  }
  std::vector<std::vector<double>> cols;
  cols.reserve(values_.size());
  for (const auto& column : values_) {
    cols.emplace_back(column.begin() + window.on, column.begin() + window.off);
  }
  return SeriesFrame(channels_, std::move(cols), sample_period_);
}

SeriesFrame load_csv_text(const std::string& text, const std::vector<std::string>& channel_spec,
                          const CsvOptions& options) {
  if (channel_spec.empty()) raise(Errc::BadConfig, "channel_spec must name at least one column");
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) raise(Errc::TooShort, "empty input");
  const auto header = split_line(line, options.delimiter);

  std::vector<std::size_t> column_of;
  for (const auto& want : channel_spec) {
    auto it = std::find_if(header.begin(), header.end(),
                           [&](const std::string& h) { return trim(h) == want; });
    if (it == header.end()) raise(Errc::MissingColumn, "column '" + want + "' not in header");
    column_of.push_back(static_cast<std::size_t>(it - header.begin()));
  }

  std::vector<std::vector<double>> values(channel_spec.size());
  std::int64_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_line(line, options.delimiter);
    for (std::size_t i = 0; i < column_of.size(); ++i) {
      if (column_of[i] >= cells.size()) {
        raise(Errc::NonNumericCell, "row " + std::to_string(row) + " has no cell for column '" +
                                        channel_spec[i] + "'");
      }
      const std::string cell = trim(cells[column_of[i]]);
      double parsed = 0.0;
      std::size_t used = 0;
      bool ok = !cell.empty();
      if (ok) {
        try {
          parsed = std::stod(cell, &used);
        } catch (const std::exception&) {
          ok = false;
        }
      }
      if (ok && used != cell.size()) ok = false;
      if (ok && !std::isfinite(parsed)) ok = false;
      if (!ok) {
        raise(Errc::NonNumericCell, "row " + std::to_string(row) + ", column '" + channel_spec[i] +
                                        "': cannot parse '" + cell + "'");
      }
      values[i].push_back(parsed);
    }
    ++row;
  }
  if (row < 2) raise(Errc::TooShort, "need at least 2 data rows, got " + std::to_string(row));
  return SeriesFrame(channel_spec, std::move(values), options.sample_period);
}

SeriesFrame load_csv(const std::string& path, const std::vector<std::string>& channel_spec,
                     const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_csv_text(buffer.str(), channel_spec, options);
}

void write_csv(const std::string& path, const SeriesFrame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot write '" + path + "'");
  out << "t";
  for (const auto& name : frame.channels()) out << "," << name;
  out << "\n";
  char buf[64];
  for (std::int64_t t = 0; t < frame.length(); ++t) {
    out << t;
    for (std::size_t c = 0; c < frame.channel_count(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.6f", frame.channel(c)[static_cast<std::size_t>(t)]);
      out << "," << buf;
    }
    out << "\n";
  }
}

}  // namespace elt
