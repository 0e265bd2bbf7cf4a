#include "elt/parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "elt/errors.hpp"

namespace elt {

namespace {

constexpr int kMaxDepth = 64;

enum class Tok { Ident, String, Number, LBrace, RBrace, LParen, RParen, Comma, Equals, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  Token next() {
    skip_ws_and_comments();
    Token tok;
    tok.line = line_;
    tok.col = col_;
    if (pos_ >= src_.size()) {
      tok.kind = Tok::End;
      return tok;
    }
    const char c = src_[pos_];
    switch (c) {
      case '{': advance(); tok.kind = Tok::LBrace; return tok;
      case '}': advance(); tok.kind = Tok::RBrace; return tok;
      case '(': advance(); tok.kind = Tok::LParen; return tok;
      case ')': advance(); tok.kind = Tok::RParen; return tok;
      case ',': advance(); tok.kind = Tok::Comma; return tok;
      case '=': advance(); tok.kind = Tok::Equals; return tok;
      case '"': return lex_string(tok);
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_ident(tok);
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      return lex_number(tok);
    }
    fail(tok.line, tok.col, "unexpected character");
  }

  [[noreturn]] void fail(int line, int col, const std::string& expected) const {
    raise(Errc::SyntaxError,
          "line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + expected);
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws_and_comments() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  Token lex_string(Token tok) {
    advance();  // opening quote
    std::string out;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      char c = src_[pos_];
      if (c == '\n') fail(tok.line, tok.col, "unterminated string");
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) fail(tok.line, tok.col, "unterminated escape");
        const char esc = src_[pos_];
        if (esc == '"' || esc == '\\') {
          out.push_back(esc);
        } else if (esc == 'n') {
          out.push_back('\n');
        } else {
          fail(line_, col_, "unknown escape sequence");
        }
        advance();
        continue;
      }
      out.push_back(c);
      advance();
    }
    if (pos_ >= src_.size()) fail(tok.line, tok.col, "unterminated string");
    advance();  // closing quote
    tok.kind = Tok::String;
    tok.text = std::move(out);
    return tok;
  }

  Token lex_ident(Token tok) {
    std::string out;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        out.push_back(c);
        advance();
      } else {
        break;
      }
    }
    tok.kind = Tok::Ident;
    tok.text = std::move(out);
    return tok;
  }

  Token lex_number(Token tok) {
    std::string out;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.' ||
          c == 'e' || c == 'E') {
        out.push_back(c);
        advance();
      } else {
        break;
      }
    }
    try {
      std::size_t used = 0;
      tok.number = std::stod(out, &used);
      if (used != out.size() || !std::isfinite(tok.number)) throw std::invalid_argument(out);
    } catch (const std::exception&) {
      fail(tok.line, tok.col, "malformed number '" + out + "'");
    }
    tok.kind = Tok::Number;
    tok.text = std::move(out);
    return tok;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(const std::string& src, const PredicateRegistry& registry)
      : lexer_(src), registry_(registry) {
    bump();
  }

  EventCatalog parse_catalog() {
    EventCatalog catalog;
    expect_event_keyword();
    while (cur_.kind != Tok::End) {
      SchemaTree tree = parse_event();
      if (catalog.schemas.count(tree.event_type) != 0) {
        raise(Errc::DuplicateEventType, "event \"" + tree.event_type + "\" defined twice");
      }
      enforce_axioms(tree);
      catalog.schemas.emplace(tree.event_type, std::move(tree));
    }
    if (catalog.schemas.empty()) lexer_.fail(cur_.line, cur_.col, "expected at least one event");
    return catalog;
  }

 private:
  void bump() { cur_ = lexer_.next(); }

  void expect(Tok kind, const std::string& what) {
    if (cur_.kind != kind) lexer_.fail(cur_.line, cur_.col, "expected " + what);
    bump();
  }

  void expect_event_keyword() {
    if (cur_.kind != Tok::Ident || cur_.text != "event") {
      lexer_.fail(cur_.line, cur_.col, "expected 'event'");
    }
  }

  SchemaTree parse_event() {
    // caller guarantees cur_ == "event"
    bump();
    if (cur_.kind != Tok::String) lexer_.fail(cur_.line, cur_.col, "expected event name string");
    SchemaTree tree;
    tree.event_type = cur_.text;
    if (tree.event_type.empty()) lexer_.fail(cur_.line, cur_.col, "event name must be nonempty");
    bump();
    expect(Tok::LBrace, "'{'");
    tree.root = parse_node(0);
    expect(Tok::RBrace, "'}'");
    return tree;
  }

  SchemaNode parse_node(int depth) {
    if (depth > kMaxDepth) lexer_.fail(cur_.line, cur_.col, "nesting too deep");
    if (cur_.kind != Tok::Ident) lexer_.fail(cur_.line, cur_.col, "expected node");
    if (cur_.text == "prim") return parse_primitive();
    const auto op = op_from_name(cur_.text);
    if (!op) raise(Errc::UnknownOperator, "'" + cur_.text + "' is not an operator");
    bump();
    expect(Tok::LParen, "'('");
    std::vector<SchemaNode> children;
    children.push_back(parse_node(depth + 1));
    while (cur_.kind == Tok::Comma) {
      bump();
      children.push_back(parse_node(depth + 1));
    }
    expect(Tok::RParen, "')'");
    return SchemaNode::composite(*op, std::move(children));
  }

  SchemaNode parse_primitive() {
    bump();  // prim
    expect(Tok::LParen, "'('");
    expect_ident("channel");
    expect(Tok::Equals, "'='");
    if (cur_.kind != Tok::String) lexer_.fail(cur_.line, cur_.col, "expected channel string");
    std::string channel = cur_.text;
    if (channel.empty()) lexer_.fail(cur_.line, cur_.col, "channel must be nonempty");
    bump();
    expect(Tok::Comma, "','");
    expect_ident("predicate");
    expect(Tok::Equals, "'='");
    PredicateRef pred = parse_predicate_ref();
    expect(Tok::RParen, "')'");
    return SchemaNode::primitive(std::move(channel), std::move(pred));
  }

  void expect_ident(const std::string& word) {
    if (cur_.kind != Tok::Ident || cur_.text != word) {
      lexer_.fail(cur_.line, cur_.col, "expected '" + word + "'");
    }
    bump();
  }

  PredicateRef parse_predicate_ref() {
    if (cur_.kind != Tok::Ident) lexer_.fail(cur_.line, cur_.col, "expected predicate name");
    PredicateRef ref;
    ref.name = cur_.text;
    bump();
    if (cur_.kind == Tok::LParen) {
      bump();
      parse_param(ref);
      while (cur_.kind == Tok::Comma) {
        bump();
        parse_param(ref);
      }
      expect(Tok::RParen, "')'");
    }
    if (!registry_.contains(ref.name)) {
      raise(Errc::UnknownPredicate, "'" + ref.name + "' is not registered");
    }
    registry_.validate_ref(ref);
    return ref;
  }

  void parse_param(PredicateRef& ref) {
    if (cur_.kind != Tok::Ident) lexer_.fail(cur_.line, cur_.col, "expected parameter name");
    const std::string key = cur_.text;
    bump();
    expect(Tok::Equals, "'='");
    if (cur_.kind != Tok::Number) {
      lexer_.fail(cur_.line, cur_.col, "expected numeric parameter value");
    }
    if (ref.params.count(key) != 0) {
      lexer_.fail(cur_.line, cur_.col, "duplicate parameter '" + key + "'");
    }
    ref.params[key] = cur_.number;
    bump();
  }

  void enforce_axioms(const SchemaTree& tree) {
    const auto violations = validate_axioms(tree);
    if (!violations.empty()) {
      std::string msg = "event \"" + tree.event_type + "\": " + violations.front().detail +
                        " at node '" + violations.front().path + "'";
      raise(Errc::AxiomViolation, msg);
    }
  }

  Lexer lexer_;
  const PredicateRegistry& registry_;
  Token cur_;
};

void walk_violations(const SchemaNode& node, const std::string& path,
                     std::vector<Violation>& out) {
  if (node.leaf) {
    if (node.predicate.name.rfind("not_", 0) == 0) {
      out.push_back({Violation::Kind::NegatedPredicate, path,
                     "primitives must be positively defined ('" + node.predicate.name + "')"});
    }
    return;
  }
  if (node.children.size() < 2) {
    out.push_back({Violation::Kind::CompositeArity, path,
                   std::string(op_name(node.op)) + " composite needs at least 2 children"});
  }
  if (node.op == OpKind::Guard && node.children.size() != 2) {
    out.push_back({Violation::Kind::GuardArity, path,
                   "GUARD takes exactly (inner, outer), got " +
                       std::to_string(node.children.size()) + " children"});
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    const std::string child_path = path.empty() ? std::to_string(i) : path + "." + std::to_string(i);
    walk_violations(node.children[i], child_path, out);
  }
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_param(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void render_node(const SchemaNode& node, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (node.leaf) {
    out += pad + "prim(channel=" + quote(node.channel) + ", predicate=" + node.predicate.name;
    if (!node.predicate.params.empty()) {
      out += "(";
      bool first = true;
      for (const auto& [key, value] : node.predicate.params) {
        if (!first) out += ", ";
        out += key + "=" + format_param(value);
        first = false;
      }
      out += ")";
    }
    out += ")";
    return;
  }
  out += pad + std::string(op_name(node.op)) + "(\n";
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    render_node(node.children[i], indent + 1, out);
    if (i + 1 < node.children.size()) out += ",";
    out += "\n";
  }
  out += pad + ")";
}

}  // namespace

std::vector<Violation> validate_axioms(const SchemaTree& schema) {
  std::vector<Violation> out;
  walk_violations(schema.root, "", out);
  return out;
}

EventCatalog parse_schema(const std::string& source, const PredicateRegistry& registry) {
  if (source.empty()) raise(Errc::SyntaxError, "line 1, col 1: empty schema source");
  Parser parser(source, registry);
  return parser.parse_catalog();
}

EventCatalog parse_schema_file(const std::string& path, const PredicateRegistry& registry) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_schema(buffer.str(), registry);
}

std::string render_schema(const SchemaTree& schema) {
  std::string out = "event " + quote(schema.event_type) + " {\n";
  render_node(schema.root, 1, out);
  out += "\n}\n";
  return out;
}

std::string render_catalog(const EventCatalog& catalog) {
  std::string out;
  bool first = true;
  for (const auto& [_, schema] : catalog.schemas) {
    if (!first) out += "\n";
    out += render_schema(schema);
    first = false;
  }
  return out;
}

}  // namespace elt
