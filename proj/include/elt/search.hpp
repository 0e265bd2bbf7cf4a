#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>

#include "elt/candidates.hpp"
#include "elt/logic.hpp"

namespace elt {

enum class SearchMethod { Exhaustive, Beam };

struct SearchResult {
  InstanceTree best;
  double root_score = 0.0;
  std::uint64_t explored = 0;  ///< complete assignments scored
  SearchMethod method = SearchMethod::Exhaustive;
};

/// Scores every full leaf assignment and returns the argmax (ties resolve to
/// the lexicographically earliest onset vector, then offsets). Throws
/// BudgetExceeded when the assignment count exceeds the budget. Serves as
/// the correctness oracle for beam search. When `trace` is given, every
/// scored complete assignment is streamed to it as one JSON line.
SearchResult instantiate_exhaustive(std::shared_ptr<const SchemaTree> schema,
                                    const CandidateSet& candidates, const OperatorParams& params,
                                    std::uint64_t budget = 1'000'000,
                                    std::ostream* trace = nullptr);

/// Assigns leaves left to right, scoring partial assignments with mu = 1
/// wildcards for unbound leaves (an admissible upper bound) and keeping the
/// top beam_width partials per step. With beam_width >= the assignment count
/// this equals instantiate_exhaustive. `trace` streams the completed
/// assignments of the final step as JSON lines.
SearchResult instantiate_beam(std::shared_ptr<const SchemaTree> schema,
                              const CandidateSet& candidates, const OperatorParams& params,
                              int beam_width = 32, std::ostream* trace = nullptr);

struct RefineConfig {
  double radius_frac = 0.02;  ///< boundary search radius as fraction of T; 0 disables
  int max_passes = 3;
  std::int64_t min_len = 2;  ///< refined intervals never shrink below this
};

/// Local boundary polish: hill-climbs each leaf boundary within the radius,
/// re-scoring the moved leaf against the signal and accepting only strict
/// root-score improvements. Deterministic.
SearchResult refine_boundaries(const SeriesFrame& frame, const SearchResult& result,
                               const OperatorParams& params, const RefineConfig& config,
                               const PredicateRegistry& registry = PredicateRegistry::builtin());

}  // namespace elt
