#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "elt/interval.hpp"
#include "elt/schema.hpp"

namespace elt {

/// Hyperparameters of the temporal-logic operators.
struct OperatorParams {
  std::int64_t delta = 1;                  ///< SEQ gap bound (samples)
  double kappa = 0.25;                     ///< SYNC/OR alignment tolerance
  double sigma = 1.0;                      ///< GUARD spill temperature (samples)
  std::int64_t epsilon = 1;                ///< collision nullity threshold (samples)
  std::int64_t compactness_tolerance = 1;  ///< max undefined internal gap (samples)

  /// delta = sigma = 5% of T, compactness_tolerance = delta, epsilon = 1.
  static OperatorParams defaults_for(std::int64_t series_length);
};

/// One node of an instantiated tree: the matching schema node plus the
/// assigned interval and coherence score. Composite values derive from the
/// children via the operator fold (see propagate).
struct InstanceNode {
  const SchemaNode* schema = nullptr;
  Interval interval{};
  double mu = 0.0;
  std::vector<InstanceNode> children;

  bool is_primitive() const { return schema != nullptr && schema->leaf; }
};

/// An instantiated schema. The shared_ptr keeps the schema nodes the
/// instances point at alive; instance trees are cheap to copy.
struct InstanceTree {
  std::shared_ptr<const SchemaTree> schema;
  InstanceNode root;
  OperatorParams params;
};

/// Primitive instances beneath `inst` that are semantically active: all
/// leaves, except that an OR subtree contributes only the leaves of its
/// highest-mu branch (ties resolve to the earlier child).
std::vector<const InstanceNode*> primitive_descendants(const InstanceNode& inst);

/// Channel-semantic collision: 1 iff some pair of active primitive
/// descendants shares a channel with intersection length > epsilon.
int collision(const InstanceNode& a, const InstanceNode& b, const OperatorParams& params);

// Binary operator scores. Children must already carry interval and mu.
double score_seq(const InstanceNode& a, const InstanceNode& b, const OperatorParams& params);
double score_sync(const InstanceNode& a, const InstanceNode& b, const OperatorParams& params);
double score_guard(const InstanceNode& inner, const InstanceNode& outer,
                   const OperatorParams& params);
double score_or(const InstanceNode& a, const InstanceNode& b, const OperatorParams& params);

/// Gate selector of the generalized temporal conjunction.
enum class ConjGate { Seq, Sync, Guard };

/// Generalized temporal conjunction: (mu_A * mu_B) * K * (1 - collision),
/// with K the gate/penalty of the selected conjunctive operator. Agrees
/// exactly with score_seq / score_sync / score_guard.
double score_and_k(const InstanceNode& a, const InstanceNode& b, ConjGate gate,
                   const OperatorParams& params);

struct Propagation {
  InstanceNode root;  ///< fresh tree with every composite interval/mu filled in
  double root_score = 0.0;
};

/// Bottom-up confidence propagation over an instance tree whose leaves carry
/// interval and mu. n-ary folds: SEQ gates adjacent pairs, SYNC/OR penalize
/// all pairs, collisions are checked across all child pairs, and conjunctive
/// composites with an internal coverage gap beyond compactness_tolerance are
/// zeroed. Throws ShapeMismatch if the instance tree does not mirror the
/// schema.
Propagation propagate(const InstanceTree& tree);

/// Interval/score pair assigned to one schema leaf.
struct LeafBinding {
  Interval interval{};
  double mu = 0.0;
};

/// Root score for a (possibly partial) leaf assignment in depth-first leaf
/// order. Unassigned leaves are admissible mu = 1 wildcards: every pairwise
/// gate or penalty that involves a subtree with unbound leaves is skipped,
/// so the result never increases when a wildcard is bound.
double score_partial(const SchemaNode& root, std::span<const std::optional<LeafBinding>> bindings,
                     const OperatorParams& params);

/// Fully annotated instance tree for a complete leaf assignment.
InstanceTree build_instance_tree(std::shared_ptr<const SchemaTree> schema,
                                 std::span<const LeafBinding> bindings,
                                 const OperatorParams& params);

/// Longest internal gap left uncovered by the given intervals within their
/// overall span; 0 when they tile the span (or for a single interval).
std::int64_t max_internal_gap(std::vector<Interval> intervals);

}  // namespace elt
