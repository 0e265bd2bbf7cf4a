#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace elt {

/// Temporal-logic operators of composite nodes.
enum class OpKind { Seq, Sync, Guard, Or };

std::string_view op_name(OpKind op);
std::optional<OpKind> op_from_name(std::string_view name);

/// Reference to a registered morphological predicate, with optional
/// per-reference threshold overrides.
struct PredicateRef {
  std::string name;
  std::map<std::string, double> params;

  friend bool operator==(const PredicateRef&, const PredicateRef&) = default;
};

/// One node of an event schema: either a primitive (leaf, one predicate on
/// one physical channel) or a composite (operator over >= 2 children;
/// GUARD takes exactly (inner, outer)).
struct SchemaNode {
  bool leaf = true;
  // primitive fields
  PredicateRef predicate;
  std::string channel;
  // composite fields
  OpKind op = OpKind::Seq;
  std::vector<SchemaNode> children;

  static SchemaNode primitive(std::string channel, PredicateRef predicate);
  static SchemaNode composite(OpKind op, std::vector<SchemaNode> children);

  friend bool operator==(const SchemaNode&, const SchemaNode&) = default;
};

struct SchemaTree {
  std::string event_type;
  SchemaNode root;

  std::set<std::string> declared_channels() const;
  std::size_t leaf_count() const;

  friend bool operator==(const SchemaTree&, const SchemaTree&) = default;
};

/// All schemas of a detection task, keyed (uniquely) by event type.
struct EventCatalog {
  std::map<std::string, SchemaTree> schemas;
};

/// Leaves of a schema in depth-first, left-to-right order. This ordering is
/// the leaf index space used by candidate sets and search assignments.
std::vector<const SchemaNode*> schema_leaves(const SchemaNode& root);

}  // namespace elt
