#include "elt/predicates.hpp"

#include <cmath>
#include <limits>

#include "elt/errors.hpp"

namespace elt {

namespace {

constexpr double kDisabled = std::numeric_limits<double>::infinity();

std::map<std::string, PredicateSpec> builtin_entries() {
  using FS = FeatureSel;
  using GD = GateDir;
  std::map<std::string, PredicateSpec> entries;
  auto add = [&](const std::string& name, std::vector<Gate> gates) {
    entries[name] = PredicateSpec{name, std::move(gates)};
  };
  add("stable", {{"slope", FS::AbsNormSlope, GD::Low, 0.15}, {"cv", FS::Cv, GD::Low, 0.10}});
  add("rise", {{"slope", FS::NormSlope, GD::High, 0.30},
               {"r2", FS::R2Linear, GD::High, 0.60},
               {"delta_cap", FS::AbsNetDelta, GD::Low, kDisabled}});
  add("fall", {{"slope", FS::NegNormSlope, GD::High, 0.30},
               {"slope_cap", FS::NegNormSlope, GD::Low, kDisabled},
               {"r2", FS::R2Linear, GD::High, 0.60},
               {"delta_cap", FS::AbsNetDelta, GD::Low, kDisabled}});
  add("spike", {{"prominence", FS::PeakProminence, GD::High, 1.00},
                {"net", FS::AbsNetDelta, GD::Low, 0.30}});
  add("drop", {{"net", FS::NegNetDelta, GD::High, 0.50},
               {"slope", FS::NegNormSlope, GD::High, 0.50},
               {"r2", FS::R2Linear, GD::High, 0.50}});
  add("plateau", {{"net", FS::AbsNetDelta, GD::Low, 0.20}, {"cv", FS::Cv, GD::Low, 0.12}});
  add("square_wave", {{"prominence", FS::PeakProminence, GD::High, 0.80},
                      {"net", FS::AbsNetDelta, GD::Low, 0.30},
                      {"cv", FS::Cv, GD::High, 0.35}});
  add("concave_rise", {{"slope", FS::NormSlope, GD::High, 0.30},
                       {"r2", FS::R2Linear, GD::High, 0.60},
                       {"curvature", FS::Curvature, GD::Low, -0.05},
                       {"delta_cap", FS::AbsNetDelta, GD::Low, kDisabled}});
  return entries;
}

}  // namespace

SegmentFeatures compute_features(const SeriesFrame& frame, const std::string& channel,
                                 const Interval& interval) {
  const std::size_t ci = frame.channel_index(channel);
  if (interval.on < 0 || interval.off > frame.length()) {
    raise(Errc::OutOfBounds, "interval [" + std::to_string(interval.on) + ", " +
                                 std::to_string(interval.off) + ") outside series of length " +
                                 std::to_string(frame.length()));
  }
  const std::int64_t n64 = interval.length();
  if (n64 < 2) raise(Errc::SegmentTooShort, "segment must span at least 2 samples");
  const std::size_t n = static_cast<std::size_t>(n64);
  const double* y = frame.channel(ci).data() + interval.on;
  const double scale = frame.robust_scale(ci);
  const double dn = static_cast<double>(n);

  // Linear least squares over centered local time t' = t - (n-1)/2.
  const double t_mid = (dn - 1.0) / 2.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean_y += y[i];
  mean_y /= dn;

  double sty = 0.0;  // sum t' * y
  double stt = 0.0;  // sum t'^2
  double sst = 0.0;  // sum (y - mean)^2
  for (std::size_t i = 0; i < n; ++i) {
    const double tc = static_cast<double>(i) - t_mid;
    const double dy = y[i] - mean_y;
    sty += tc * dy;
    stt += tc * tc;
    sst += dy * dy;
  }
  const double slope = sty / stt;
  double sse = sst - slope * sty;
  if (sse < 0.0) sse = 0.0;

  SegmentFeatures f;
  f.norm_slope = slope * dn / scale;
  f.r2_linear = (sst <= 1e-24) ? 1.0 : std::min(1.0, std::max(0.0, 1.0 - sse / sst));
  f.cv = std::sqrt(sse / dn) / scale;
  f.net_delta = (y[n - 1] - y[0]) / scale;

  // Curvature: least-squares quadratic coefficient doubled (the LS estimate
  // of the constant second difference), made length-invariant with n^2.
  if (n >= 3) {
    double mean_q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double tc = static_cast<double>(i) - t_mid;
      mean_q += tc * tc;
    }
    mean_q /= dn;
    double sqq = 0.0;
    double sqy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double tc = static_cast<double>(i) - t_mid;
      const double q = tc * tc - mean_q;
      sqq += q * q;
      sqy += q * (y[i] - mean_y);
    }
    if (sqq > 0.0) f.curvature = 2.0 * (sqy / sqq) * dn * dn / scale;
  }

  // Max deviation from the line through the segment endpoints.
  const double step = (y[n - 1] - y[0]) / (dn - 1.0);
  double max_dev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double line = y[0] + step * static_cast<double>(i);
    max_dev = std::max(max_dev, std::abs(y[i] - line));
  }
  f.peak_prominence = max_dev / scale;
  return f;
}

double logistic_gate(double x, double theta, GateDir dir) {
  const double s = std::max(std::abs(theta), 1e-6) / 4.0;
  const double z = (dir == GateDir::High) ? (x - theta) / s : (theta - x) / s;
  return 1.0 / (1.0 + std::exp(-z));
}

double select_feature(const SegmentFeatures& f, FeatureSel sel) {
  switch (sel) {
    case FeatureSel::NormSlope: return f.norm_slope;
    case FeatureSel::NegNormSlope: return -f.norm_slope;
    case FeatureSel::AbsNormSlope: return std::abs(f.norm_slope);
    case FeatureSel::R2Linear: return f.r2_linear;
    case FeatureSel::Curvature: return f.curvature;
    case FeatureSel::Cv: return f.cv;
    case FeatureSel::NetDelta: return f.net_delta;
    case FeatureSel::NegNetDelta: return -f.net_delta;
    case FeatureSel::AbsNetDelta: return std::abs(f.net_delta);
    case FeatureSel::PeakProminence: return f.peak_prominence;
  }
  return 0.0;
}

const PredicateRegistry& PredicateRegistry::builtin() {
  static const PredicateRegistry registry = [] {
    PredicateRegistry r;
    r.entries_ = builtin_entries();
    return r;
  }();
  return registry;
}

bool PredicateRegistry::contains(const std::string& name) const {
  return entries_.count(name) != 0;
}

const PredicateSpec& PredicateRegistry::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) raise(Errc::UnknownPredicate, "'" + name + "' is not registered");
  return it->second;
}

void PredicateRegistry::validate_ref(const PredicateRef& ref) const {
  const PredicateSpec& spec = at(ref.name);
  for (const auto& [key, value] : ref.params) {
    bool known = false;
    for (const auto& gate : spec.gates) {
      if (gate.param == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      raise(Errc::BadParameter, "predicate '" + ref.name + "' has no parameter '" + key + "'");
    }
    if (!std::isfinite(value)) {
      raise(Errc::BadParameter, "parameter '" + key + "' of '" + ref.name + "' must be finite");
    }
  }
}

double PredicateRegistry::score(const PredicateRef& ref, const SegmentFeatures& features) const {
  const PredicateSpec& spec = at(ref.name);
  validate_ref(ref);
  double mu = 1.0;
  for (const auto& gate : spec.gates) {
    double theta = gate.theta;
    auto it = ref.params.find(gate.param);
    if (it != ref.params.end()) theta = it->second;
    if (!std::isfinite(theta)) continue;  // optional gate left disabled
    mu *= logistic_gate(select_feature(features, gate.feature), theta, gate.dir);
  }
  return mu;
}

PredicateRegistry PredicateRegistry::with_overrides(
    const std::map<std::string, std::map<std::string, double>>& overrides) const {
  PredicateRegistry out = *this;
  for (const auto& [pred_name, params] : overrides) {
    auto it = out.entries_.find(pred_name);
    if (it == out.entries_.end()) {
      raise(Errc::BadConfig, "override for unknown predicate '" + pred_name + "'");
    }
    for (const auto& [key, value] : params) {
      bool found = false;
      for (auto& gate : it->second.gates) {
        if (gate.param == key) {
          gate.theta = value;
          found = true;
          break;
        }
      }
      if (!found) {
        raise(Errc::BadConfig,
              "predicate '" + pred_name + "' has no threshold named '" + key + "'");
      }
    }
  }
  return out;
}

double score_predicate(const PredicateRef& ref, const SegmentFeatures& features,
                       const PredicateRegistry& registry) {
  return registry.score(ref, features);
}

}  // namespace elt
