// Recursive-descent parser and evaluator for the scalar expression grammar
// used to describe nonlinearities f(u) and time weights psi(t).
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ('-')? base ('^' factor)?          (right-associative power)
//   base   := number | 't' | 'u' | func '(' expr ')' | '(' expr ')'
//   func   := 'exp' | 'log'
//
// Two-argument pow is written with '^'; calling pow(...) is rejected with a
// hint. Numbers are decimal with optional exponent notation.

#pragma once

#include <cctype>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace blowlab::expr {

struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(const std::string& what, std::size_t pos)
      : std::runtime_error(what + " (at position " + std::to_string(pos) + ")"),
        position(pos) {}
};

enum class NodeKind { Number, VarT, VarU, Neg, Add, Sub, Mul, Div, Pow, Exp, Log };

struct Node {
  NodeKind kind;
  double value = 0.0;  // Number only
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;  // binary ops only
};

using NodePtr = std::shared_ptr<const Node>;

namespace detail {

inline NodePtr make(NodeKind k, NodePtr l = nullptr, NodePtr r = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

inline NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Number;
  n->value = v;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr root = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected trailing input '" + std::string(1, text_[pos_]) + "'", pos_);
    return root;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (consume('+'))
        lhs = make(NodeKind::Add, lhs, parse_term());
      else if (consume('-'))
        lhs = make(NodeKind::Sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    for (;;) {
      if (consume('*'))
        lhs = make(NodeKind::Mul, lhs, parse_factor());
      else if (consume('/'))
        lhs = make(NodeKind::Div, lhs, parse_factor());
      else
        return lhs;
    }
  }

  NodePtr parse_factor() {
    if (consume('-')) return make(NodeKind::Neg, parse_factor());
    NodePtr b = parse_base();
    if (consume('^')) return make(NodeKind::Pow, b, parse_factor());
    return b;
  }

  NodePtr parse_base() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  NodePtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' was not an exponent
      }
    }
    std::string tok(text_.substr(start, pos_ - start));
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return make_number(v);
    } catch (const std::exception&) {
      throw ParseError("malformed number '" + tok + "'", start);
    }
  }

  NodePtr parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (name == "t") return make(NodeKind::VarT);
    if (name == "u") return make(NodeKind::VarU);
    if (name == "exp" || name == "log") {
      if (!consume('(')) throw ParseError("expected '(' after '" + name + "'", pos_);
      NodePtr arg = parse_expr();
      if (consume(',')) throw ParseError("'" + name + "' takes exactly one argument", pos_);
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      return make(name == "exp" ? NodeKind::Exp : NodeKind::Log, arg);
    }
    if (name == "pow")
      throw ParseError("'pow' is not a function here; write two-argument pow as base^exponent",
                       start);
    throw ParseError("unknown identifier '" + name + "'", start);
  }
};

inline int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
  }
}

inline void print(const Node& n, std::ostream& os, int parent_prec, bool rhs_of_parent) {
  int prec = precedence(n.kind);
  // '-' and '/' are left-associative, '^' right-associative: parenthesize a
  // same-precedence child on the non-associative side.
  bool need_paren = prec < parent_prec || (prec == parent_prec && rhs_of_parent);
  switch (n.kind) {
    case NodeKind::Number: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << n.value;
      std::string s = tmp.str();
      if (n.value < 0 && parent_prec > 1) {
        os << '(' << s << ')';
      } else {
        os << s;
      }
      return;
    }
    case NodeKind::VarT: os << 't'; return;
    case NodeKind::VarU: os << 'u'; return;
    case NodeKind::Exp:
      os << "exp(";
      print(*n.lhs, os, 0, false);
      os << ')';
      return;
    case NodeKind::Log:
      os << "log(";
      print(*n.lhs, os, 0, false);
      os << ')';
      return;
    case NodeKind::Neg:
      if (need_paren) os << '(';
      os << '-';
      print(*n.lhs, os, prec, true);
      if (need_paren) os << ')';
      return;
    default: break;
  }
  const char* op = n.kind == NodeKind::Add   ? "+"
                   : n.kind == NodeKind::Sub ? "-"
                   : n.kind == NodeKind::Mul ? "*"
                   : n.kind == NodeKind::Div ? "/"
                                             : "^";
  if (need_paren) os << '(';
  // For right-associative '^' the parenthesization sides flip.
  bool pow = n.kind == NodeKind::Pow;
  print(*n.lhs, os, prec, pow);
  os << op;
  print(*n.rhs, os, prec, !pow);
  if (need_paren) os << ')';
}

}  // namespace detail

/// Parsed expression over the variables t and u.
class Expr {
 public:
  Expr() = default;

  static Expr parse(std::string_view text) {
    Expr e;
    e.root_ = detail::Parser(text).parse();
    e.source_ = std::string(text);
    return e;
  }

  bool valid() const { return root_ != nullptr; }
  const std::string& source() const { return source_; }

  double eval(double t, double u) const { return eval_node(*root_, t, u); }

  /// Canonical pretty-print; re-parsing it yields an equivalent tree.
  std::string str() const {
    std::ostringstream os;
    detail::print(*root_, os, 0, false);
    return os.str();
  }

  bool uses_t() const { return uses(*root_, NodeKind::VarT); }
  bool uses_u() const { return uses(*root_, NodeKind::VarU); }

 private:
  NodePtr root_;
  std::string source_;

  static bool uses(const Node& n, NodeKind var) {
    if (n.kind == var) return true;
    if (n.lhs && uses(*n.lhs, var)) return true;
    if (n.rhs && uses(*n.rhs, var)) return true;
    return false;
  }

  static double eval_node(const Node& n, double t, double u) {
    switch (n.kind) {
      case NodeKind::Number: return n.value;
      case NodeKind::VarT: return t;
      case NodeKind::VarU: return u;
      case NodeKind::Neg: return -eval_node(*n.lhs, t, u);
      case NodeKind::Add: return eval_node(*n.lhs, t, u) + eval_node(*n.rhs, t, u);
      case NodeKind::Sub: return eval_node(*n.lhs, t, u) - eval_node(*n.rhs, t, u);
      case NodeKind::Mul: return eval_node(*n.lhs, t, u) * eval_node(*n.rhs, t, u);
      case NodeKind::Div: return eval_node(*n.lhs, t, u) / eval_node(*n.rhs, t, u);
      case NodeKind::Pow: return std::pow(eval_node(*n.lhs, t, u), eval_node(*n.rhs, t, u));
      case NodeKind::Exp: return std::exp(eval_node(*n.lhs, t, u));
      case NodeKind::Log: return std::log(eval_node(*n.lhs, t, u));
    }
    return std::numeric_limits<double>::quiet_NaN();
  }
};

}  // namespace blowlab::expr
