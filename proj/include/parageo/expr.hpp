#pragma once

#include <charconv>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "parageo/dual.hpp"
#include "parageo/errors.hpp"

namespace parageo::expr {

// Parse failure inside one expression or one input line. Positions are
// 1-based; `line` is meaningful when the caller supplies it.
struct ParseError : ConfigError {
  int line;
  int col;
  ParseError(int line_, int col_, const std::string& message)
      : ConfigError(message), line(line_), col(col_) {}
};

enum class Kind {
  Constant,
  Variable,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  PowConst,  // value holds the exponent
  Pow,
  Sin,
  Cos,
  Exp,
  Log,  // produced by differentiation of Pow, not by the parser
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Kind kind;
  double value = 0.0;
  int var = -1;
  NodePtr lhs;
  NodePtr rhs;
};

inline NodePtr make_node(Kind k, double value, int var, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->value = value;
  n->var = var;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

inline NodePtr make_const(double v) {
  return make_node(Kind::Constant, v, -1, nullptr, nullptr);
}

inline NodePtr make_var(int index) {
  return make_node(Kind::Variable, 0.0, index, nullptr, nullptr);
}

inline bool const_value(const NodePtr& n, double* out) {
  if (!n || n->kind != Kind::Constant) return false;
  *out = n->value;
  return true;
}

// Node builders fold constant subtrees and drop arithmetic identities so
// that differentiation does not blow up tree sizes.
inline NodePtr make_neg(NodePtr x);

inline NodePtr make_add(NodePtr l, NodePtr r) {
  double a, b;
  bool lc = const_value(l, &a), rc = const_value(r, &b);
  if (lc && rc) return make_const(a + b);
  if (lc && a == 0.0) return r;
  if (rc && b == 0.0) return l;
  return make_node(Kind::Add, 0.0, -1, std::move(l), std::move(r));
}

inline NodePtr make_sub(NodePtr l, NodePtr r) {
  double a, b;
  bool lc = const_value(l, &a), rc = const_value(r, &b);
  if (lc && rc) return make_const(a - b);
  if (rc && b == 0.0) return l;
  if (lc && a == 0.0) return make_neg(std::move(r));
  return make_node(Kind::Sub, 0.0, -1, std::move(l), std::move(r));
}

inline NodePtr make_mul(NodePtr l, NodePtr r) {
  double a, b;
  bool lc = const_value(l, &a), rc = const_value(r, &b);
  if (lc && rc) return make_const(a * b);
  if (lc) {
    if (a == 0.0) return make_const(0.0);
    if (a == 1.0) return r;
    if (a == -1.0) return make_neg(std::move(r));
  }
  if (rc) {
    if (b == 0.0) return make_const(0.0);
    if (b == 1.0) return l;
    if (b == -1.0) return make_neg(std::move(l));
  }
  return make_node(Kind::Mul, 0.0, -1, std::move(l), std::move(r));
}

inline NodePtr make_div(NodePtr l, NodePtr r) {
  double a, b;
  bool lc = const_value(l, &a), rc = const_value(r, &b);
  if (lc && rc && b != 0.0) return make_const(a / b);
  if (lc && a == 0.0) return make_const(0.0);
  if (rc && b == 1.0) return l;
  return make_node(Kind::Div, 0.0, -1, std::move(l), std::move(r));
}

inline NodePtr make_neg(NodePtr x) {
  double a;
  if (const_value(x, &a)) return make_const(-a);
  if (x->kind == Kind::Neg) return x->lhs;
  return make_node(Kind::Neg, 0.0, -1, std::move(x), nullptr);
}

inline NodePtr make_pow(NodePtr base, NodePtr exponent) {
  double b, e;
  bool bc = const_value(base, &b);
  if (const_value(exponent, &e)) {
    if (bc) return make_const(std::pow(b, e));
    if (e == 0.0) return make_const(1.0);
    if (e == 1.0) return base;
    return make_node(Kind::PowConst, e, -1, std::move(base), nullptr);
  }
  return make_node(Kind::Pow, 0.0, -1, std::move(base), std::move(exponent));
}

inline NodePtr make_fn(Kind k, NodePtr x) {
  double a;
  if (const_value(x, &a)) {
    switch (k) {
      case Kind::Sin: return make_const(std::sin(a));
      case Kind::Cos: return make_const(std::cos(a));
      case Kind::Exp: return make_const(std::exp(a));
      case Kind::Log: return make_const(std::log(a));
      default: break;
    }
  }
  return make_node(k, 0.0, -1, std::move(x), nullptr);
}

template <class T>
T eval_node(const Node& n, std::span<const T> xs) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  switch (n.kind) {
    case Kind::Constant: return T(n.value);
    case Kind::Variable: return xs[static_cast<std::size_t>(n.var)];
    case Kind::Add: return eval_node(*n.lhs, xs) + eval_node(*n.rhs, xs);
    case Kind::Sub: return eval_node(*n.lhs, xs) - eval_node(*n.rhs, xs);
    case Kind::Mul: return eval_node(*n.lhs, xs) * eval_node(*n.rhs, xs);
    case Kind::Div: return eval_node(*n.lhs, xs) / eval_node(*n.rhs, xs);
    case Kind::Neg: return -eval_node(*n.lhs, xs);
    case Kind::PowConst: return pow(eval_node(*n.lhs, xs), n.value);
    case Kind::Pow: return pow(eval_node(*n.lhs, xs), eval_node(*n.rhs, xs));
    case Kind::Sin: return sin(eval_node(*n.lhs, xs));
    case Kind::Cos: return cos(eval_node(*n.lhs, xs));
    case Kind::Exp: return exp(eval_node(*n.lhs, xs));
    case Kind::Log: return log(eval_node(*n.lhs, xs));
  }
  return T(0.0);
}

inline NodePtr diff_node(const NodePtr& n, int var) {
  switch (n->kind) {
    case Kind::Constant: return make_const(0.0);
    case Kind::Variable: return make_const(n->var == var ? 1.0 : 0.0);
    case Kind::Add: return make_add(diff_node(n->lhs, var), diff_node(n->rhs, var));
    case Kind::Sub: return make_sub(diff_node(n->lhs, var), diff_node(n->rhs, var));
    case Kind::Mul:
      return make_add(make_mul(diff_node(n->lhs, var), n->rhs),
                      make_mul(n->lhs, diff_node(n->rhs, var)));
    case Kind::Div:
      return make_div(make_sub(make_mul(diff_node(n->lhs, var), n->rhs),
                               make_mul(n->lhs, diff_node(n->rhs, var))),
                      make_mul(n->rhs, n->rhs));
    case Kind::Neg: return make_neg(diff_node(n->lhs, var));
    case Kind::PowConst:
      return make_mul(make_mul(make_const(n->value),
                               make_pow(n->lhs, make_const(n->value - 1.0))),
                      diff_node(n->lhs, var));
    case Kind::Pow:
      // d(a^b) = a^b * (b' * log a + b * a'/a)
      return make_mul(
          make_pow(n->lhs, n->rhs),
          make_add(make_mul(diff_node(n->rhs, var), make_fn(Kind::Log, n->lhs)),
                   make_mul(n->rhs, make_div(diff_node(n->lhs, var), n->lhs))));
    case Kind::Sin: return make_mul(make_fn(Kind::Cos, n->lhs), diff_node(n->lhs, var));
    case Kind::Cos:
      return make_neg(make_mul(make_fn(Kind::Sin, n->lhs), diff_node(n->lhs, var)));
    case Kind::Exp: return make_mul(make_fn(Kind::Exp, n->lhs), diff_node(n->lhs, var));
    case Kind::Log: return make_div(diff_node(n->lhs, var), n->lhs);
  }
  return make_const(0.0);
}

inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void print_node(const Node& n, std::span<const std::string> names,
                       std::string& out) {
  switch (n.kind) {
    case Kind::Constant:
      if (n.value < 0.0) {
        out += "(";
        out += format_double(n.value);
        out += ")";
      } else {
        out += format_double(n.value);
      }
      return;
    case Kind::Variable:
      out += names[static_cast<std::size_t>(n.var)];
      return;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      const char* op = n.kind == Kind::Add   ? " + "
                       : n.kind == Kind::Sub ? " - "
                       : n.kind == Kind::Mul ? " * "
                                             : " / ";
      out += "(";
      print_node(*n.lhs, names, out);
      out += op;
      print_node(*n.rhs, names, out);
      out += ")";
      return;
    }
    case Kind::Neg:
      out += "(-";
      print_node(*n.lhs, names, out);
      out += ")";
      return;
    case Kind::PowConst:
      out += "(";
      print_node(*n.lhs, names, out);
      out += " ^ ";
      if (n.value < 0.0) {
        out += "(";
        out += format_double(n.value);
        out += ")";
      } else {
        out += format_double(n.value);
      }
      out += ")";
      return;
    case Kind::Pow:
      out += "(";
      print_node(*n.lhs, names, out);
      out += " ^ ";
      print_node(*n.rhs, names, out);
      out += ")";
      return;
    case Kind::Sin:
    case Kind::Cos:
    case Kind::Exp:
    case Kind::Log: {
      const char* fn = n.kind == Kind::Sin   ? "sin"
                       : n.kind == Kind::Cos ? "cos"
                       : n.kind == Kind::Exp ? "exp"
                                             : "log";
      out += fn;
      out += "(";
      print_node(*n.lhs, names, out);
      out += ")";
      return;
    }
  }
}

// Immutable scalar expression over named coordinates.
class Expr {
 public:
  Expr() : root_(make_const(0.0)) {}
  explicit Expr(NodePtr root) : root_(std::move(root)) {}

  static Expr constant(double v) { return Expr(make_const(v)); }
  static Expr variable(int index) { return Expr(make_var(index)); }

  const NodePtr& root() const { return root_; }

  bool is_constant(double* out) const { return const_value(root_, out); }

  bool is_zero() const {
    double v;
    return const_value(root_, &v) && v == 0.0;
  }

  template <class T>
  T eval(std::span<const T> xs) const {
    return eval_node<T>(*root_, xs);
  }

  Expr derivative(int var) const { return Expr(diff_node(root_, var)); }

  std::string to_string(std::span<const std::string> names) const {
    std::string out;
    print_node(*root_, names, out);
    return out;
  }

  friend Expr operator+(const Expr& l, const Expr& r) {
    return Expr(make_add(l.root_, r.root_));
  }
  friend Expr operator-(const Expr& l, const Expr& r) {
    return Expr(make_sub(l.root_, r.root_));
  }
  friend Expr operator*(const Expr& l, const Expr& r) {
    return Expr(make_mul(l.root_, r.root_));
  }
  friend Expr operator/(const Expr& l, const Expr& r) {
    return Expr(make_div(l.root_, r.root_));
  }
  friend Expr operator-(const Expr& x) { return Expr(make_neg(x.root_)); }

 private:
  NodePtr root_;
};

inline Expr pow(const Expr& base, const Expr& exponent) {
  return Expr(make_pow(base.root(), exponent.root()));
}
inline Expr sin(const Expr& x) { return Expr(make_fn(Kind::Sin, x.root())); }
inline Expr cos(const Expr& x) { return Expr(make_fn(Kind::Cos, x.root())); }
inline Expr exp(const Expr& x) { return Expr(make_fn(Kind::Exp, x.root())); }

namespace detail {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  double number = 0.0;
  std::string_view text;
  int col = 0;
};

class Lexer {
 public:
  Lexer(std::string_view src, int line) : src_(src), line_(line) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    throw ParseError(line_, at.col, message);
  }

  int line() const { return line_; }

 private:
  void advance() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
    tok_.col = static_cast<int>(pos_) + 1;
    if (pos_ >= src_.size()) {
      tok_.kind = Tok::End;
      tok_.text = {};
      return;
    }
    char c = src_[pos_];
    switch (c) {
      case '+': tok_.kind = Tok::Plus; break;
      case '-': tok_.kind = Tok::Minus; break;
      case '*': tok_.kind = Tok::Star; break;
      case '/': tok_.kind = Tok::Slash; break;
      case '^': tok_.kind = Tok::Caret; break;
      case '(': tok_.kind = Tok::LParen; break;
      case ')': tok_.kind = Tok::RParen; break;
      default: {
        if ((c >= '0' && c <= '9') || c == '.') {
          const char* begin = src_.data() + pos_;
          const char* end = src_.data() + src_.size();
          double value = 0.0;
          auto res = std::from_chars(begin, end, value);
          if (res.ec != std::errc()) {
            throw ParseError(line_, tok_.col, "malformed number");
          }
          tok_.kind = Tok::Number;
          tok_.number = value;
          tok_.text = std::string_view(begin, static_cast<std::size_t>(res.ptr - begin));
          pos_ += tok_.text.size();
          return;
        }
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
          std::size_t start = pos_;
          while (pos_ < src_.size() &&
                 ((src_[pos_] >= 'a' && src_[pos_] <= 'z') ||
                  (src_[pos_] >= 'A' && src_[pos_] <= 'Z') ||
                  (src_[pos_] >= '0' && src_[pos_] <= '9') || src_[pos_] == '_')) {
            ++pos_;
          }
          tok_.kind = Tok::Ident;
          tok_.text = src_.substr(start, pos_ - start);
          return;
        }
        throw ParseError(line_, tok_.col,
                         std::string("unexpected character '") + c + "'");
      }
    }
    tok_.text = src_.substr(pos_, 1);
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_;
  Token tok_;
};

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> coords, int line)
      : lex_(src, line), coords_(coords) {}

  NodePtr parse() {
    NodePtr e = parse_sum();
    if (lex_.peek().kind != Tok::End) {
      lex_.fail(lex_.peek(), "unexpected trailing input");
    }
    return e;
  }

 private:
  NodePtr parse_sum() {
    NodePtr e = parse_term();
    while (true) {
      Tok k = lex_.peek().kind;
      if (k == Tok::Plus) {
        lex_.take();
        e = make_add(std::move(e), parse_term());
      } else if (k == Tok::Minus) {
        lex_.take();
        e = make_sub(std::move(e), parse_term());
      } else {
        return e;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_unary();
    while (true) {
      Tok k = lex_.peek().kind;
      if (k == Tok::Star) {
        lex_.take();
        e = make_mul(std::move(e), parse_unary());
      } else if (k == Tok::Slash) {
        lex_.take();
        e = make_div(std::move(e), parse_unary());
      } else {
        return e;
      }
    }
  }

  NodePtr parse_unary() {
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      return make_neg(parse_unary());
    }
    if (lex_.peek().kind == Tok::Plus) {
      lex_.take();
      return parse_unary();
    }
    return parse_power();
  }

  // '^' binds tighter than unary minus and associates to the right.
  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (lex_.peek().kind == Tok::Caret) {
      lex_.take();
      return make_pow(std::move(base), parse_unary());
    }
    return base;
  }

  NodePtr parse_atom() {
    Token t = lex_.take();
    switch (t.kind) {
      case Tok::Number: return make_const(t.number);
      case Tok::LParen: {
        NodePtr e = parse_sum();
        Token close = lex_.take();
        if (close.kind != Tok::RParen) lex_.fail(close, "expected ')'");
        return e;
      }
      case Tok::Ident: {
        if (t.text == "sin" || t.text == "cos" || t.text == "exp") {
          Token open = lex_.take();
          if (open.kind != Tok::LParen) {
            lex_.fail(open, std::string("expected '(' after '") +
                                std::string(t.text) + "'");
          }
          NodePtr arg = parse_sum();
          Token close = lex_.take();
          if (close.kind != Tok::RParen) lex_.fail(close, "expected ')'");
          Kind k = t.text == "sin" ? Kind::Sin : t.text == "cos" ? Kind::Cos : Kind::Exp;
          return make_fn(k, std::move(arg));
        }
        for (std::size_t i = 0; i < coords_.size(); ++i) {
          if (coords_[i] == t.text) return make_var(static_cast<int>(i));
        }
        lex_.fail(t, "unknown identifier '" + std::string(t.text) + "'");
      }
      default:
        lex_.fail(t, "expected a number, coordinate, function, or '('");
    }
  }

  Lexer lex_;
  std::span<const std::string> coords_;
};

}  // namespace detail

// Parses one expression over the given coordinate names. `line` is carried
// into error positions so callers reading multi-line files report correctly.
inline Expr parse_expression(std::string_view text,
                             std::span<const std::string> coords, int line = 1) {
  detail::Parser p(text, coords, line);
  return Expr(p.parse());
}

}  // namespace parageo::expr
