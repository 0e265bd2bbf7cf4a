#pragma once

#include <string>
#include <vector>

#include "elt/predicates.hpp"
#include "elt/schema.hpp"

namespace elt {

/// One axiom/structure violation found in a schema. `path` addresses the
/// offending node as dot-joined child indices from the root ("" = root).
struct Violation {
  enum class Kind { CompositeArity, GuardArity, NegatedPredicate };
  Kind kind;
  std::string path;
  std::string detail;
};

/// Checks the statically checkable structural rules: composites need
/// >= 2 children, GUARD takes exactly (inner, outer), and primitives must be
/// positively defined (no `not_` prefixed predicate names).
std::vector<Violation> validate_axioms(const SchemaTree& schema);

/// Parses event-schema DSL text into a catalog. Grammar:
///   catalog  := event+
///   event    := "event" STRING "{" node "}"
///   node     := composite | primitive
///   composite:= OP "(" node ("," node)+ ")"
///   OP       := "SEQ" | "SYNC" | "GUARD" | "OR"
///   primitive:= "prim" "(" "channel" "=" STRING "," "predicate" "=" pred ")"
///   pred     := IDENT [ "(" param ("," param)* ")" ]
///   param    := IDENT "=" NUMBER
/// `#` starts a line comment. Predicates are checked against the registry
/// and accepted trees satisfy the schema axioms; violations raise
/// AxiomViolation, malformed input raises SyntaxError with line/column.
EventCatalog parse_schema(const std::string& source,
                          const PredicateRegistry& registry = PredicateRegistry::builtin());

EventCatalog parse_schema_file(const std::string& path,
                               const PredicateRegistry& registry = PredicateRegistry::builtin());

/// Canonical DSL text; parse_schema(render_schema(s)) reproduces s.
std::string render_schema(const SchemaTree& schema);
std::string render_catalog(const EventCatalog& catalog);

}  // namespace elt
