#include "elt/logic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "elt/errors.hpp"

namespace elt {

OperatorParams OperatorParams::defaults_for(std::int64_t series_length) {
  OperatorParams p;
  p.delta = std::max<std::int64_t>(1, std::llround(0.05 * static_cast<double>(series_length)));
  p.kappa = 0.25;
  p.sigma = std::max(1.0, 0.05 * static_cast<double>(series_length));
  p.epsilon = 1;
  p.compactness_tolerance = p.delta;
  return p;
}

namespace {

// --- shared primitive views for collision checks ------------------------

struct PrimView {
  const std::string* channel;
  Interval interval;
};

bool views_collide(const std::vector<PrimView>& a, const std::vector<PrimView>& b,
                   std::int64_t epsilon) {
  for (const auto& p : a) {
    for (const auto& q : b) {
      if (*p.channel == *q.channel && intersection_length(p.interval, q.interval) > epsilon) {
        return true;
      }
    }
  }
  return false;
}

void collect_views(const InstanceNode& inst, std::vector<PrimView>& out) {
  for (const InstanceNode* prim : primitive_descendants(inst)) {
    out.push_back({&prim->schema->channel, prim->interval});
  }
}

// --- gates and penalties -------------------------------------------------

double gate_causal(const Interval& a, const Interval& b) {
  return (b.on > a.on && b.off > a.off) ? 1.0 : 0.0;
}

double gate_coherence(const Interval& a, const Interval& b, std::int64_t delta) {
  return (b.on - a.off - delta < 0) ? 1.0 : 0.0;
}

double sync_penalty(const Interval& a, const Interval& b, double kappa) {
  return std::exp(-(1.0 - iou(a, b)) / kappa);
}

double guard_penalty(const Interval& inner, const Interval& outer, double sigma) {
  const double d_on = static_cast<double>(std::max<std::int64_t>(0, outer.on - inner.on));
  const double d_off = static_cast<double>(std::max<std::int64_t>(0, inner.off - outer.off));
  return std::exp(-(d_on + d_off) / sigma);
}

// --- evaluation over (schema, leaf bindings) ------------------------------
//
// One engine serves full propagation, partial scoring during search, and the
// n-ary folds. A node is complete when every leaf beneath it is bound;
// interval-dependent factors are applied only between complete children so
// that a partial score is an upper bound on any completion. Collision pairs
// use every bound primitive, except that OR subtrees expose their primitives
// only once fully bound (their active branch is undecided before that).

struct EvalNode {
  const SchemaNode* schema = nullptr;
  bool complete = false;
  Interval interval{};
  double mu = 1.0;
  std::vector<EvalNode> children;
  std::vector<PrimView> pi;
};

EvalNode evaluate_node(const SchemaNode& node,
                       std::span<const std::optional<LeafBinding>> bindings, std::size_t& cursor,
                       const OperatorParams& params) {
  EvalNode out;
  out.schema = &node;
  if (node.leaf) {
    if (cursor >= bindings.size()) {
      raise(Errc::ShapeMismatch, "fewer leaf bindings than schema leaves");
    }
    const auto& binding = bindings[cursor++];
    if (binding.has_value()) {
      out.complete = true;
      out.interval = binding->interval;
      out.mu = binding->mu;
      out.pi.push_back({&node.channel, binding->interval});
    } else {
      out.complete = false;
      out.mu = 1.0;
    }
    return out;
  }

  if (node.children.size() < 2) {
    raise(Errc::AxiomViolation, "composite nodes need at least 2 children");
  }
  if (node.op == OpKind::Guard && node.children.size() != 2) {
    raise(Errc::AxiomViolation, "GUARD takes exactly (inner, outer)");
  }
  out.children.reserve(node.children.size());
  for (const auto& child : node.children) {
    out.children.push_back(evaluate_node(child, bindings, cursor, params));
  }
  const std::size_t k = out.children.size();
  out.complete = std::all_of(out.children.begin(), out.children.end(),
                             [](const EvalNode& c) { return c.complete; });

  double mu = 1.0;
  if (node.op == OpKind::Or) {
    // probabilistic-sum fold, then pairwise alignment penalties
    mu = out.children[0].mu;
    for (std::size_t i = 1; i < k; ++i) {
      const double m = out.children[i].mu;
      mu = mu + m - mu * m;
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        if (out.children[i].complete && out.children[j].complete) {
          mu *= sync_penalty(out.children[i].interval, out.children[j].interval, params.kappa);
        }
      }
    }
  } else {
    for (const auto& child : out.children) mu *= child.mu;
    // Physical Exclusivity across all child pairs
    bool psi = false;
    for (std::size_t i = 0; i < k && !psi; ++i) {
      for (std::size_t j = i + 1; j < k && !psi; ++j) {
        psi = views_collide(out.children[i].pi, out.children[j].pi, params.epsilon);
      }
    }
    mu *= psi ? 0.0 : 1.0;
    switch (node.op) {
      case OpKind::Seq:
        for (std::size_t i = 0; i + 1 < k; ++i) {
          if (out.children[i].complete && out.children[i + 1].complete) {
            mu *= gate_causal(out.children[i].interval, out.children[i + 1].interval);
            mu *= gate_coherence(out.children[i].interval, out.children[i + 1].interval,
                                 params.delta);
          }
        }
        break;
      case OpKind::Sync:
        for (std::size_t i = 0; i < k; ++i) {
          for (std::size_t j = i + 1; j < k; ++j) {
            if (out.children[i].complete && out.children[j].complete) {
              mu *= sync_penalty(out.children[i].interval, out.children[j].interval, params.kappa);
            }
          }
        }
        break;
      case OpKind::Guard:
        if (out.children[0].complete && out.children[1].complete) {
          mu *= guard_penalty(out.children[0].interval, out.children[1].interval, params.sigma);
        }
        break;
      case OpKind::Or:
        break;
    }
    // Temporal Compactness: a conjunctive composite must cover its span
    if (out.complete) {
      std::vector<Interval> intervals;
      intervals.reserve(k);
      for (const auto& child : out.children) intervals.push_back(child.interval);
      if (max_internal_gap(std::move(intervals)) > params.compactness_tolerance) mu *= 0.0;
    }
  }
  out.mu = mu;

  if (out.complete) {
    Interval sp = out.children[0].interval;
    for (std::size_t i = 1; i < k; ++i) sp = span(sp, out.children[i].interval);
    out.interval = sp;
  }

  if (node.op == OpKind::Or) {
    if (out.complete) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < k; ++i) {
        if (out.children[i].mu > out.children[best].mu) best = i;
      }
      out.pi = out.children[best].pi;
    }
    // incomplete OR exposes nothing: its active branch is undecided
  } else {
    for (const auto& child : out.children) {
      out.pi.insert(out.pi.end(), child.pi.begin(), child.pi.end());
    }
  }
  return out;
}

InstanceNode to_instance(const EvalNode& node) {
  InstanceNode out;
  out.schema = node.schema;
  out.interval = node.interval;
  out.mu = node.mu;
  out.children.reserve(node.children.size());
  for (const auto& child : node.children) out.children.push_back(to_instance(child));
  return out;
}

bool shapes_match(const SchemaNode& schema, const InstanceNode& inst) {
  if (inst.schema == nullptr) return false;
  if (schema.leaf != inst.schema->leaf) return false;
  if (schema.leaf) {
    return schema.channel == inst.schema->channel &&
           schema.predicate.name == inst.schema->predicate.name && inst.children.empty();
  }
  if (schema.op != inst.schema->op || schema.children.size() != inst.children.size()) return false;
  for (std::size_t i = 0; i < schema.children.size(); ++i) {
    if (!shapes_match(schema.children[i], inst.children[i])) return false;
  }
  return true;
}

void collect_leaf_bindings(const InstanceNode& inst, std::vector<std::optional<LeafBinding>>& out) {
  if (inst.is_primitive()) {
    out.push_back(LeafBinding{inst.interval, inst.mu});
    return;
  }
  for (const auto& child : inst.children) collect_leaf_bindings(child, out);
}

}  // namespace

std::vector<const InstanceNode*> primitive_descendants(const InstanceNode& inst) {
  std::vector<const InstanceNode*> out;
  if (inst.is_primitive()) {
    out.push_back(&inst);
    return out;
  }
  if (inst.schema != nullptr && inst.schema->op == OpKind::Or && !inst.children.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < inst.children.size(); ++i) {
      if (inst.children[i].mu > inst.children[best].mu) best = i;
    }
    return primitive_descendants(inst.children[best]);
  }
  for (const auto& child : inst.children) {
    const auto sub = primitive_descendants(child);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

int collision(const InstanceNode& a, const InstanceNode& b, const OperatorParams& params) {
  std::vector<PrimView> va;
  std::vector<PrimView> vb;
  collect_views(a, va);
  collect_views(b, vb);
  return views_collide(va, vb, params.epsilon) ? 1 : 0;
}

double score_seq(const InstanceNode& a, const InstanceNode& b, const OperatorParams& params) {
  double s = a.mu * b.mu;
  s *= 1.0 - static_cast<double>(collision(a, b, params));
  s *= gate_causal(a.interval, b.interval);
  s *= gate_coherence(a.interval, b.interval, params.delta);
  return s;
}

double score_sync(const InstanceNode& a, const InstanceNode& b, const OperatorParams& params) {
  double s = a.mu * b.mu;
  s *= 1.0 - static_cast<double>(collision(a, b, params));
  s *= sync_penalty(a.interval, b.interval, params.kappa);
  return s;
}

double score_guard(const InstanceNode& inner, const InstanceNode& outer,
                   const OperatorParams& params) {
  double s = inner.mu * outer.mu;
  s *= 1.0 - static_cast<double>(collision(inner, outer, params));
  s *= guard_penalty(inner.interval, outer.interval, params.sigma);
  return s;
}

double score_or(const InstanceNode& a, const InstanceNode& b, const OperatorParams& params) {
  double s = a.mu + b.mu - a.mu * b.mu;
  s *= sync_penalty(a.interval, b.interval, params.kappa);
  return s;
}

double score_and_k(const InstanceNode& a, const InstanceNode& b, ConjGate gate,
                   const OperatorParams& params) {
  double k = 1.0;
  switch (gate) {
    case ConjGate::Seq:
      k = gate_causal(a.interval, b.interval) * gate_coherence(a.interval, b.interval, params.delta);
      break;
    case ConjGate::Sync:
      k = sync_penalty(a.interval, b.interval, params.kappa);
      break;
    case ConjGate::Guard:
      k = guard_penalty(a.interval, b.interval, params.sigma);
      break;
  }
  double s = a.mu * b.mu;
  s *= 1.0 - static_cast<double>(collision(a, b, params));
  s *= k;
  return s;
}

Propagation propagate(const InstanceTree& tree) {
  if (!tree.schema) raise(Errc::ShapeMismatch, "instance tree has no schema");
  if (!shapes_match(tree.schema->root, tree.root)) {
    raise(Errc::ShapeMismatch,
          "instance tree is not isomorphic to schema \"" + tree.schema->event_type + "\"");
  }
  std::vector<std::optional<LeafBinding>> bindings;
  collect_leaf_bindings(tree.root, bindings);
  std::size_t cursor = 0;
  EvalNode eval = evaluate_node(tree.schema->root, bindings, cursor, tree.params);
  Propagation result;
  result.root = to_instance(eval);
  result.root_score = eval.mu;
  return result;
}

double score_partial(const SchemaNode& root, std::span<const std::optional<LeafBinding>> bindings,
                     const OperatorParams& params) {
  std::size_t cursor = 0;
  return evaluate_node(root, bindings, cursor, params).mu;
}

InstanceTree build_instance_tree(std::shared_ptr<const SchemaTree> schema,
                                 std::span<const LeafBinding> bindings,
                                 const OperatorParams& params) {
  std::vector<std::optional<LeafBinding>> opt(bindings.begin(), bindings.end());
  std::size_t cursor = 0;
  EvalNode eval = evaluate_node(schema->root, opt, cursor, params);
  if (cursor != opt.size()) {
    raise(Errc::ShapeMismatch, "binding count does not match schema leaf count");
  }
  InstanceTree tree;
  tree.schema = std::move(schema);
  tree.root = to_instance(eval);
  tree.params = params;
  return tree;
}

std::int64_t max_internal_gap(std::vector<Interval> intervals) {
  if (intervals.size() < 2) return 0;
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.on < b.on; });
  std::int64_t covered_until = intervals[0].off;
  std::int64_t worst = 0;
  for (std::size_t i = 1; i < intervals.size(); ++i) {
    if (intervals[i].on > covered_until) worst = std::max(worst, intervals[i].on - covered_until);
    covered_until = std::max(covered_until, intervals[i].off);
  }
  return worst;
}

}  // namespace elt
