#include "elt/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "elt/errors.hpp"

namespace elt {

namespace {

/// O(1) linear-fit SSE over [s, e) via prefix sums.
class LinearCost {
 public:
  explicit LinearCost(const std::vector<double>& x) {
    const std::size_t n = x.size();
    s1_.assign(n + 1, 0.0);
    st_.assign(n + 1, 0.0);
    s2_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      s1_[i + 1] = s1_[i] + x[i];
      st_[i + 1] = st_[i] + static_cast<double>(i) * x[i];
      s2_[i + 1] = s2_[i] + x[i] * x[i];
    }
  }

  double sse(std::int64_t s, std::int64_t e) const {
    const double n = static_cast<double>(e - s);
    if (n < 2.0) return 0.0;
    const double sy = s1_[e] - s1_[s];
    const double sty = st_[e] - st_[s];
    const double syy = s2_[e] - s2_[s];
    // sums of t and t^2 over [s, e)
    const double a = static_cast<double>(s);
    const double b = static_cast<double>(e - 1);
    const double st = (a + b) * n / 2.0;
    const double stt = sum_sq(b) - sum_sq(a - 1.0);
    const double det = n * stt - st * st;
    if (det <= 0.0) return 0.0;
    const double beta = (n * sty - st * sy) / det;
    const double alpha = (sy - beta * st) / n;
    double cost = syy - alpha * sy - beta * sty;
    return std::max(cost, 0.0);
  }

 private:
  static double sum_sq(double m) {
    if (m < 0.0) return 0.0;
    return m * (m + 1.0) * (2.0 * m + 1.0) / 6.0;
  }

  std::vector<double> s1_, st_, s2_;
};

constexpr std::int64_t kMinSegment = 4;

struct Split {
  double gain;
  double whole_sse;
  std::int64_t at;
  std::int64_t begin;
  std::int64_t end;
};

bool find_best_split(const LinearCost& cost, std::int64_t begin, std::int64_t end, Split& out) {
  if (end - begin < 2 * kMinSegment) return false;
  const double whole = cost.sse(begin, end);
  double best_gain = -1.0;
  std::int64_t best_at = -1;
  for (std::int64_t t = begin + kMinSegment; t + kMinSegment <= end; ++t) {
    const double gain = whole - cost.sse(begin, t) - cost.sse(t, end);
    if (gain > best_gain) {
      best_gain = gain;
      best_at = t;
    }
  }
  if (best_at < 0) return false;
  out = Split{best_gain, whole, best_at, begin, end};
  return true;
}

}  // namespace

std::int64_t CandidateGenConfig::min_candidate_len(std::int64_t series_length) const {
  const auto relative =
      static_cast<std::int64_t>(std::llround(min_len_frac * static_cast<double>(series_length)));
  return std::max<std::int64_t>(2, std::max(min_len, relative));
}

std::vector<std::int64_t> detect_breakpoints(const std::vector<double>& x, double beta,
                                             int max_breakpoints) {
  const std::int64_t n = static_cast<std::int64_t>(x.size());
  std::vector<std::int64_t> breakpoints;
  if (n < 2 * kMinSegment || max_breakpoints <= 0) return breakpoints;

  // Normalize by the noise scale (robust sd of successive differences) so
  // the beta * log T penalty is scale-free and compares against unit noise.
  std::vector<double> diffs(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) diffs[i] = std::abs(x[i + 1] - x[i]);
  std::nth_element(diffs.begin(), diffs.begin() + diffs.size() / 2, diffs.end());
  const double noise_sd = std::max(1.4826 * diffs[diffs.size() / 2] / std::sqrt(2.0), 1e-9);
  std::vector<double> sorted(x);
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - median) / noise_sd;

  const LinearCost cost(z);
  const double penalty = beta * std::log(static_cast<double>(n));

  // Best-gain-first expansion keeps the result deterministic under the cap.
  auto cmp = [](const Split& a, const Split& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.at > b.at;
  };
  std::priority_queue<Split, std::vector<Split>, decltype(cmp)> queue(cmp);
  Split split{};
  if (find_best_split(cost, 0, n, split)) queue.push(split);
  while (!queue.empty() && static_cast<int>(breakpoints.size()) < max_breakpoints) {
    const Split top = queue.top();
    queue.pop();
    // the relative term absorbs cancellation error in the prefix-sum SSE,
    // which otherwise fabricates gains on noiseless stepped signals
    if (top.gain <= penalty + 1e-12 * top.whole_sse) continue;
    breakpoints.push_back(top.at);
    if (find_best_split(cost, top.begin, top.at, split)) queue.push(split);
    if (find_best_split(cost, top.at, top.end, split)) queue.push(split);
  }
  std::sort(breakpoints.begin(), breakpoints.end());
  return breakpoints;
}

CandidateSet generate_candidates(const SeriesFrame& frame, const SchemaTree& schema,
                                 const CandidateGenConfig& config,
                                 const PredicateRegistry& registry) {
  const std::int64_t T = frame.length();
  for (const auto& channel : schema.declared_channels()) {
    if (!frame.has_channel(channel)) {
      raise(Errc::UnknownChannel, "schema channel '" + channel + "' not in frame");
    }
  }

  CandidateSet set;
  for (const auto& channel : schema.declared_channels()) {
    set.breakpoints[channel] =
        detect_breakpoints(frame.channel(channel), config.breakpoint_beta, config.max_breakpoints);
  }

  const std::int64_t min_len = config.min_candidate_len(T);
  const auto span_limit = std::max<std::int64_t>(
      min_len, static_cast<std::int64_t>(std::llround(config.span_limit_frac * static_cast<double>(T))));

  // Grid scales shared by every primitive.
  for (std::int64_t div : {16, 8, 4, 2}) {
    const std::int64_t w = T / div;
    if (w >= std::max<std::int64_t>(2, min_len)) set.grid_scales.push_back(w);
  }
  if (set.grid_scales.empty()) set.grid_scales.push_back(std::max<std::int64_t>(2, T / 2));

  // Phase boundaries are synchronized across channels, so every primitive
  // draws on the pooled breakpoints of all referenced channels.
  std::vector<std::int64_t> bounds;
  bounds.push_back(0);
  for (const auto& [_, bps] : set.breakpoints) bounds.insert(bounds.end(), bps.begin(), bps.end());
  bounds.push_back(T);
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  const auto leaves = schema_leaves(schema.root);
  set.per_leaf.reserve(leaves.size());
  for (const SchemaNode* leaf : leaves) {
    std::set<Interval, decltype([](const Interval& a, const Interval& b) {
               return a.on != b.on ? a.on < b.on : a.off < b.off;
             })>
        intervals;

    // breakpoint-delimited segments and their contiguous merges
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
      for (std::size_t j = i + 1; j < bounds.size(); ++j) {
        const std::int64_t len = bounds[j] - bounds[i];
        if (len < min_len || len > span_limit) continue;
        intervals.insert(Interval(bounds[i], bounds[j]));
      }
    }

    // multi-scale grid fallback
    for (std::int64_t w : set.grid_scales) {
      if (w > T) continue;
      const std::int64_t stride = std::max<std::int64_t>(1, w / 2);
      for (std::int64_t start = 0; start + w <= T; start += stride) {
        intervals.insert(Interval(start, start + w));
      }
      if ((T - w) % stride != 0) intervals.insert(Interval(T - w, T));
    }

    std::vector<ScoredCandidate> scored;
    scored.reserve(intervals.size());
    for (const Interval& interval : intervals) {
      const SegmentFeatures features = compute_features(frame, leaf->channel, interval);
      scored.push_back({interval, registry.score(leaf->predicate, features)});
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
      if (a.mu != b.mu) return a.mu > b.mu;
      if (a.interval.on != b.interval.on) return a.interval.on < b.interval.on;
      return a.interval.off < b.interval.off;
    });
    if (static_cast<int>(scored.size()) > config.max_candidates) {
      scored.resize(static_cast<std::size_t>(config.max_candidates));
    }
    set.per_leaf.push_back(std::move(scored));
  }
  return set;
}

}  // namespace elt
