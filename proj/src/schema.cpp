#include "elt/schema.hpp"

#include "elt/errors.hpp"

namespace elt {

std::string_view op_name(OpKind op) {
  switch (op) {
    case OpKind::Seq: return "SEQ";
    case OpKind::Sync: return "SYNC";
    case OpKind::Guard: return "GUARD";
    case OpKind::Or: return "OR";
  }
  return "?";
}

std::optional<OpKind> op_from_name(std::string_view name) {
  if (name == "SEQ") return OpKind::Seq;
  if (name == "SYNC") return OpKind::Sync;
  if (name == "GUARD") return OpKind::Guard;
  if (name == "OR") return OpKind::Or;
  return std::nullopt;
}

SchemaNode SchemaNode::primitive(std::string channel, PredicateRef predicate) {
  if (channel.empty()) raise(Errc::BadConfig, "primitive channel must be nonempty");
  SchemaNode node;
  node.leaf = true;
  node.channel = std::move(channel);
  node.predicate = std::move(predicate);
  return node;
}

SchemaNode SchemaNode::composite(OpKind op, std::vector<SchemaNode> children) {
  SchemaNode node;
  node.leaf = false;
  node.op = op;
  node.children = std::move(children);
  return node;
}

namespace {

void collect_channels(const SchemaNode& node, std::set<std::string>& out) {
  if (node.leaf) {
    out.insert(node.channel);
    return;
  }
  for (const auto& child : node.children) collect_channels(child, out);
}

void collect_leaves(const SchemaNode& node, std::vector<const SchemaNode*>& out) {
  if (node.leaf) {
    out.push_back(&node);
    return;
  }
  for (const auto& child : node.children) collect_leaves(child, out);
}

}  // namespace

std::set<std::string> SchemaTree::declared_channels() const {
  std::set<std::string> out;
  collect_channels(root, out);
  return out;
}

std::size_t SchemaTree::leaf_count() const { return schema_leaves(root).size(); }

std::vector<const SchemaNode*> schema_leaves(const SchemaNode& root) {
  std::vector<const SchemaNode*> out;
  collect_leaves(root, out);
  return out;
}

}  // namespace elt
