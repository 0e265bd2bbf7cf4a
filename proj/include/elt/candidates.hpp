#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "elt/interval.hpp"
#include "elt/logic.hpp"
#include "elt/predicates.hpp"
#include "elt/schema.hpp"
#include "elt/series.hpp"

namespace elt {

struct CandidateGenConfig {
  double breakpoint_beta = 3.0;      ///< split penalty beta * log(T)
  int max_breakpoints = 24;          ///< per channel
  double span_limit_frac = 0.8;      ///< candidate length cap as fraction of T
  int max_candidates = 64;           ///< per primitive, after mu ranking
  std::int64_t min_len = 8;          ///< absolute candidate length floor
  double min_len_frac = 0.02;        ///< relative floor (fraction of T)

  std::int64_t min_candidate_len(std::int64_t series_length) const;
};

struct ScoredCandidate {
  Interval interval{};
  double mu = 0.0;
};

/// Per-primitive candidate intervals (depth-first leaf order), each scored
/// by the leaf's predicate and sorted by descending mu. Generation metadata
/// records the breakpoints and grid scales used.
struct CandidateSet {
  std::vector<std::vector<ScoredCandidate>> per_leaf;
  std::map<std::string, std::vector<std::int64_t>> breakpoints;  ///< per referenced channel
  std::vector<std::int64_t> grid_scales;
};

/// Breakpoints of x by binary segmentation with a piecewise-linear cost;
/// a split is kept while it lowers the fit cost by more than beta * log(T).
/// Returned indices are sorted and strictly inside (0, T).
std::vector<std::int64_t> detect_breakpoints(const std::vector<double>& x, double beta,
                                             int max_breakpoints);

/// Candidates per primitive: every breakpoint-delimited interval and their
/// contiguous merges up to the span limit, plus a multi-scale grid fallback
/// (window sizes T/16..T/2, stride half a window) so no list is ever empty.
CandidateSet generate_candidates(const SeriesFrame& frame, const SchemaTree& schema,
                                 const CandidateGenConfig& config,
                                 const PredicateRegistry& registry = PredicateRegistry::builtin());

}  // namespace elt
