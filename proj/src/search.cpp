#include "elt/search.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>

#include "elt/errors.hpp"

namespace elt {

namespace {

void emit_trace(std::ostream* trace, const char* method, const std::string& event_type,
                const std::vector<LeafBinding>& bindings, double score) {
  if (trace == nullptr) return;
  *trace << "{\"method\":\"" << method << "\",\"event_type\":\"" << event_type
         << "\",\"score\":" << score << ",\"assignment\":[";
  for (std::size_t i = 0; i < bindings.size(); ++i) {
    if (i != 0) *trace << ",";
    *trace << "[" << bindings[i].interval.on << "," << bindings[i].interval.off << "]";
  }
  *trace << "]}\n";
}

/// Lexicographic (onset, offset) comparison of two complete assignments,
/// used to break exact score ties deterministically.
bool bindings_before(const std::vector<LeafBinding>& a, const std::vector<LeafBinding>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].interval.on != b[i].interval.on) return a[i].interval.on < b[i].interval.on;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].interval.off != b[i].interval.off) return a[i].interval.off < b[i].interval.off;
  }
  return false;
}

std::vector<LeafBinding> bindings_of(const CandidateSet& candidates,
                                     const std::vector<std::size_t>& choice) {
  std::vector<LeafBinding> out;
  out.reserve(choice.size());
  for (std::size_t i = 0; i < choice.size(); ++i) {
    const ScoredCandidate& cand = candidates.per_leaf[i][choice[i]];
    out.push_back(LeafBinding{cand.interval, cand.mu});
  }
  return out;
}

void require_candidates(const SchemaTree& schema, const CandidateSet& candidates) {
  const std::size_t leaves = schema.leaf_count();
  if (candidates.per_leaf.size() != leaves) {
    raise(Errc::ShapeMismatch, "candidate set does not match schema leaf count");
  }
  for (std::size_t i = 0; i < leaves; ++i) {
    if (candidates.per_leaf[i].empty()) {
      raise(Errc::EmptyCandidates, "no candidates for primitive #" + std::to_string(i));
    }
  }
}

}  // namespace

SearchResult instantiate_exhaustive(std::shared_ptr<const SchemaTree> schema,
                                    const CandidateSet& candidates, const OperatorParams& params,
                                    std::uint64_t budget, std::ostream* trace) {
  require_candidates(*schema, candidates);
  const std::size_t leaves = candidates.per_leaf.size();

  std::uint64_t total = 1;
  for (const auto& list : candidates.per_leaf) {
    const std::uint64_t count = list.size();
    if (total > budget / count) {
      raise(Errc::BudgetExceeded, "assignment count exceeds budget " + std::to_string(budget));
    }
    total *= count;
  }

  std::vector<std::size_t> choice(leaves, 0);
  std::vector<std::optional<LeafBinding>> opt(leaves);
  double best_score = -1.0;
  std::vector<LeafBinding> best_bindings;
  std::uint64_t explored = 0;

  for (;;) {
    std::vector<LeafBinding> bindings = bindings_of(candidates, choice);
    for (std::size_t i = 0; i < leaves; ++i) opt[i] = bindings[i];
    const double score = score_partial(schema->root, opt, params);
    ++explored;
    emit_trace(trace, "exhaustive", schema->event_type, bindings, score);
    if (score > best_score ||
        (score == best_score && !best_bindings.empty() && bindings_before(bindings, best_bindings))) {
      best_score = score;
      best_bindings = std::move(bindings);
    }
    // odometer, last leaf fastest
    std::size_t k = leaves;
    while (k > 0) {
      --k;
      if (++choice[k] < candidates.per_leaf[k].size()) break;
      choice[k] = 0;
      if (k == 0) {
        SearchResult result;
        result.best = build_instance_tree(schema, best_bindings, params);
        result.root_score = best_score;
        result.explored = explored;
        result.method = SearchMethod::Exhaustive;
        return result;
      }
    }
  }
}

SearchResult instantiate_beam(std::shared_ptr<const SchemaTree> schema,
                              const CandidateSet& candidates, const OperatorParams& params,
                              int beam_width, std::ostream* trace) {
  require_candidates(*schema, candidates);
  if (beam_width < 1) raise(Errc::BadConfig, "beam_width must be positive");
  const std::size_t leaves = candidates.per_leaf.size();

  struct Partial {
    std::vector<std::size_t> choice;
    double score = 1.0;
  };

  auto partial_before = [&](const Partial& a, const Partial& b) {
    if (a.score != b.score) return a.score > b.score;
    for (std::size_t i = 0; i < a.choice.size(); ++i) {
      const Interval& ia = candidates.per_leaf[i][a.choice[i]].interval;
      const Interval& ib = candidates.per_leaf[i][b.choice[i]].interval;
      if (ia.on != ib.on) return ia.on < ib.on;
    }
    for (std::size_t i = 0; i < a.choice.size(); ++i) {
      const Interval& ia = candidates.per_leaf[i][a.choice[i]].interval;
      const Interval& ib = candidates.per_leaf[i][b.choice[i]].interval;
      if (ia.off != ib.off) return ia.off < ib.off;
    }
    return false;
  };

  std::vector<Partial> frontier{Partial{{}, 1.0}};
  std::vector<std::optional<LeafBinding>> opt(leaves);
  std::uint64_t explored = 0;

  for (std::size_t depth = 0; depth < leaves; ++depth) {
    std::vector<Partial> next;
    next.reserve(frontier.size() * candidates.per_leaf[depth].size());
    for (const Partial& partial : frontier) {
      for (std::size_t c = 0; c < candidates.per_leaf[depth].size(); ++c) {
        Partial ext;
        ext.choice = partial.choice;
        ext.choice.push_back(c);
        std::fill(opt.begin(), opt.end(), std::nullopt);
        for (std::size_t i = 0; i < ext.choice.size(); ++i) {
          const ScoredCandidate& cand = candidates.per_leaf[i][ext.choice[i]];
          opt[i] = LeafBinding{cand.interval, cand.mu};
        }
        ext.score = score_partial(schema->root, opt, params);
        if (depth + 1 == leaves) {
          emit_trace(trace, "beam", schema->event_type, bindings_of(candidates, ext.choice),
                     ext.score);
        }
        next.push_back(std::move(ext));
      }
    }
    if (depth + 1 == leaves) explored = next.size();
    std::sort(next.begin(), next.end(), partial_before);
    if (next.size() > static_cast<std::size_t>(beam_width)) {
      next.resize(static_cast<std::size_t>(beam_width));
    }
    frontier = std::move(next);
  }

  const Partial& best = frontier.front();
  SearchResult result;
  result.best = build_instance_tree(schema, bindings_of(candidates, best.choice), params);
  result.root_score = best.score;
  result.explored = explored;
  result.method = SearchMethod::Beam;
  return result;
}

SearchResult refine_boundaries(const SeriesFrame& frame, const SearchResult& result,
                               const OperatorParams& params, const RefineConfig& config,
                               const PredicateRegistry& registry) {
  const std::int64_t T = frame.length();
  const auto radius =
      static_cast<std::int64_t>(std::llround(config.radius_frac * static_cast<double>(T)));
  if (radius <= 0) return result;

  const auto leaves = schema_leaves(result.best.schema->root);
  std::vector<std::optional<LeafBinding>> bindings;
  {
    // depth-first collection matches schema_leaves order
    auto walk = [&](auto&& self, const InstanceNode& node) -> void {
      if (node.is_primitive()) {
        bindings.emplace_back(LeafBinding{node.interval, node.mu});
        return;
      }
      for (const auto& child : node.children) self(self, child);
    };
    walk(walk, result.best.root);
  }

  auto rescore_leaf = [&](std::size_t idx, const Interval& interval) -> double {
    const SegmentFeatures features = compute_features(frame, leaves[idx]->channel, interval);
    return registry.score(leaves[idx]->predicate, features);
  };

  double current = score_partial(result.best.schema->root, bindings, params);
  const std::int64_t min_len = std::max<std::int64_t>(2, config.min_len);

  for (int pass = 0; pass < config.max_passes; ++pass) {
    bool improved = false;
    for (std::size_t idx = 0; idx < bindings.size(); ++idx) {
      for (int boundary = 0; boundary < 2; ++boundary) {
        const Interval base = bindings[idx]->interval;
        double best_score = current;
        std::optional<LeafBinding> best_binding;
        for (std::int64_t shift = -radius; shift <= radius; ++shift) {
          if (shift == 0) continue;
          std::int64_t on = base.on;
          std::int64_t off = base.off;
          (boundary == 0 ? on : off) += shift;
          if (on < 0 || off > T || off - on < min_len) continue;
          const Interval moved(on, off);
          LeafBinding trial{moved, rescore_leaf(idx, moved)};
          const LeafBinding saved = *bindings[idx];
          bindings[idx] = trial;
          const double score = score_partial(result.best.schema->root, bindings, params);
          bindings[idx] = saved;
          if (score > best_score) {
            best_score = score;
            best_binding = trial;
          }
        }
        if (best_binding.has_value()) {
          bindings[idx] = *best_binding;
          current = best_score;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }

  std::vector<LeafBinding> final_bindings;
  final_bindings.reserve(bindings.size());
  for (const auto& b : bindings) final_bindings.push_back(*b);
  SearchResult refined;
  refined.best = build_instance_tree(result.best.schema, final_bindings, params);
  refined.root_score = current;
  refined.explored = result.explored;
  refined.method = result.method;
  return refined;
}

}  // namespace elt
