#pragma once

#include <map>
#include <string>
#include <vector>

#include "elt/interval.hpp"
#include "elt/schema.hpp"
#include "elt/series.hpp"

namespace elt {

/// Shape descriptors of one signal segment, all normalized by the channel's
/// robust scale (full-channel IQR floored at 1e-9) so that affine rescaling
/// of the channel leaves them unchanged.
struct SegmentFeatures {
  double norm_slope = 0.0;       ///< least-squares slope x segment length / scale
  double r2_linear = 0.0;        ///< linear-fit coefficient of determination in [0,1]
  double curvature = 0.0;        ///< least-squares mean second difference x length^2 / scale
  double cv = 0.0;               ///< std of linear-fit residuals / scale
  double net_delta = 0.0;        ///< (last - first) / scale
  double peak_prominence = 0.0;  ///< max |deviation from the endpoints line| / scale
};

/// Deterministic features of frame[channel][interval). Requires the interval
/// to lie within the frame and to span at least 2 samples.
SegmentFeatures compute_features(const SeriesFrame& frame, const std::string& channel,
                                 const Interval& interval);

enum class FeatureSel {
  NormSlope,
  NegNormSlope,
  AbsNormSlope,
  R2Linear,
  Curvature,
  Cv,
  NetDelta,
  NegNetDelta,
  AbsNetDelta,
  PeakProminence,
};

enum class GateDir { High, Low };

/// One logistic soft gate: sigma((x - theta) / s) for High, its complement
/// for Low, with slope s = |theta| / 4. Gates whose resolved threshold is
/// non-finite are skipped (used for optional caps such as delta_cap).
struct Gate {
  std::string param;  // override key, unique within a predicate
  FeatureSel feature;
  GateDir dir;
  double theta;
};

struct PredicateSpec {
  std::string name;
  std::vector<Gate> gates;
};

double logistic_gate(double x, double theta, GateDir dir);
double select_feature(const SegmentFeatures& f, FeatureSel sel);

/// Registry of morphological predicates. The shipped vocabulary covers
/// stable, rise, fall, spike, drop, plateau, square_wave and concave_rise;
/// every gate threshold can be overridden globally (config) or per
/// reference (schema parameters). Read-only after construction.
class PredicateRegistry {
 public:
  static const PredicateRegistry& builtin();

  bool contains(const std::string& name) const;
  const PredicateSpec& at(const std::string& name) const;  // throws UnknownPredicate

  /// Throws UnknownPredicate / BadParameter for invalid references.
  void validate_ref(const PredicateRef& ref) const;

  /// mu in [0,1]: product of the predicate's logistic gates.
  double score(const PredicateRef& ref, const SegmentFeatures& features) const;

  /// Copy with per-predicate default thresholds replaced.
  PredicateRegistry with_overrides(
      const std::map<std::string, std::map<std::string, double>>& overrides) const;

  const std::map<std::string, PredicateSpec>& entries() const { return entries_; }

 private:
  std::map<std::string, PredicateSpec> entries_;
};

double score_predicate(const PredicateRef& ref, const SegmentFeatures& features,
                       const PredicateRegistry& registry = PredicateRegistry::builtin());

}  // namespace elt
