#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "elt/logic.hpp"
#include "elt/schema.hpp"

namespace elt::test {

inline SchemaNode P(const std::string& channel, const std::string& predicate = "stable") {
  return SchemaNode::primitive(channel, PredicateRef{predicate, {}});
}

inline SchemaNode C(OpKind op, std::vector<SchemaNode> children) {
  return SchemaNode::composite(op, std::move(children));
}

inline std::shared_ptr<const SchemaTree> make_tree(SchemaNode root,
                                                   std::string event_type = "test_event") {
  auto tree = std::make_shared<SchemaTree>();
  tree->event_type = std::move(event_type);
  tree->root = std::move(root);
  return tree;
}

/// Owns schema nodes so standalone InstanceNodes stay valid in tests.
class InstOwner {
 public:
  InstanceNode prim(const std::string& channel, Interval interval, double mu) {
    nodes_.push_back(std::make_unique<SchemaNode>(P(channel)));
    InstanceNode node;
    node.schema = nodes_.back().get();
    node.interval = interval;
    node.mu = mu;
    return node;
  }

 private:
  std::vector<std::unique_ptr<SchemaNode>> nodes_;
};

}  // namespace elt::test
