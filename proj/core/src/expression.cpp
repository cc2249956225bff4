#include "degdiff/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#include "degdiff/errors.hpp"

namespace degdiff {

using Kind = ExprNode::Kind;

Expr make_constant(double v) { return std::make_shared<const ExprNode>(ExprNode{Kind::Constant, v, Variable::X1, nullptr, nullptr}); }

Expr make_variable(Variable v) { return std::make_shared<const ExprNode>(ExprNode{Kind::Variable, 0.0, v, nullptr, nullptr}); }

Expr make_unary(Kind kind, Expr operand) {
  return std::make_shared<const ExprNode>(ExprNode{kind, 0.0, Variable::X1, std::move(operand), nullptr});
}

Expr make_binary(Kind kind, Expr lhs, Expr rhs) {
  return std::make_shared<const ExprNode>(ExprNode{kind, 0.0, Variable::X1, std::move(lhs), std::move(rhs)});
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    if (text_.find_first_not_of(" \t\r\n") == std::string_view::npos) throw ParseError("empty expression", 0);
    Expr e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary(Kind::Add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = make_binary(Kind::Sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary(Kind::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_binary(Kind::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return make_unary(Kind::Neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr lhs = parse_primary();
    while (accept('^')) lhs = make_binary(Kind::Pow, lhs, parse_primary());
    return lhs;
  }

  Expr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string literal(text_.substr(start, pos_ - start));
    if (literal == ".") {
      pos_ = start;
      fail("malformed number");
    }
    return make_constant(std::strtod(literal.c_str(), nullptr));
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "x1") return make_variable(Variable::X1);
    if (name == "x2") return make_variable(Variable::X2);
    if (name == "pi") return std::make_shared<const ExprNode>(ExprNode{Kind::Pi, 0.0, Variable::X1, nullptr, nullptr});

    Kind fn;
    if (name == "sin") {
      fn = Kind::Sin;
    } else if (name == "cos") {
      fn = Kind::Cos;
    } else if (name == "exp") {
      fn = Kind::Exp;
    } else if (name == "log") {
      fn = Kind::Log;
    } else {
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    if (!accept('(')) fail("expected '(' after " + std::string(name));
    Expr arg = parse_sum();
    if (!accept(')')) fail("expected ')'");
    return make_unary(fn, arg);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool is_constant(const Expr& e, double v) { return e->kind == Kind::Constant && e->value == v; }

bool is_number(const Expr& e) { return e->kind == Kind::Constant; }

// Constructors that fold the trivial identities produced by differentiation.
Expr add(Expr a, Expr b) {
  if (is_constant(a, 0.0)) return b;
  if (is_constant(b, 0.0)) return a;
  if (is_number(a) && is_number(b)) return make_constant(a->value + b->value);
  return make_binary(Kind::Add, std::move(a), std::move(b));
}

Expr sub(Expr a, Expr b) {
  if (is_constant(b, 0.0)) return a;
  if (is_constant(a, 0.0)) return is_number(b) ? make_constant(-b->value) : make_unary(Kind::Neg, std::move(b));
  if (is_number(a) && is_number(b)) return make_constant(a->value - b->value);
  return make_binary(Kind::Sub, std::move(a), std::move(b));
}

Expr mul(Expr a, Expr b) {
  if (is_constant(a, 0.0) || is_constant(b, 0.0)) return make_constant(0.0);
  if (is_constant(a, 1.0)) return b;
  if (is_constant(b, 1.0)) return a;
  if (is_number(a) && is_number(b)) return make_constant(a->value * b->value);
  return make_binary(Kind::Mul, std::move(a), std::move(b));
}

Expr div(Expr a, Expr b) {
  if (is_constant(a, 0.0)) return make_constant(0.0);
  if (is_constant(b, 1.0)) return a;
  return make_binary(Kind::Div, std::move(a), std::move(b));
}

Expr neg(Expr a) {
  if (is_number(a)) return make_constant(-a->value);
  return make_unary(Kind::Neg, std::move(a));
}

void format_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void render(const ExprNode& e, std::string& out) {
  switch (e.kind) {
    case Kind::Constant:
      if (e.value < 0.0) {
        out += "(-";
        format_number(out, -e.value);
        out += ')';
      } else {
        format_number(out, e.value);
      }
      return;
    case Kind::Variable:
      out += e.var == Variable::X1 ? "x1" : "x2";
      return;
    case Kind::Pi:
      out += "pi";
      return;
    case Kind::Neg:
      out += "(-";
      render(*e.lhs, out);
      out += ')';
      return;
    case Kind::Sin:
    case Kind::Cos:
    case Kind::Exp:
    case Kind::Log:
      out += e.kind == Kind::Sin ? "sin(" : e.kind == Kind::Cos ? "cos(" : e.kind == Kind::Exp ? "exp(" : "log(";
      render(*e.lhs, out);
      out += ')';
      return;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div:
    case Kind::Pow: {
      static constexpr char kOps[] = {'+', '-', '*', '/', '^'};
      out += '(';
      render(*e.lhs, out);
      out += kOps[static_cast<int>(e.kind) - static_cast<int>(Kind::Add)];
      render(*e.rhs, out);
      out += ')';
      return;
    }
  }
}

}  // namespace

Expr parse_expression(std::string_view text) { return Parser(text).parse(); }

double evaluate(const ExprNode& e, double x1, double x2) {
  switch (e.kind) {
    case Kind::Constant: return e.value;
    case Kind::Variable: return e.var == Variable::X1 ? x1 : x2;
    case Kind::Pi: return std::numbers::pi;
    case Kind::Neg: return -evaluate(*e.lhs, x1, x2);
    case Kind::Sin: return std::sin(evaluate(*e.lhs, x1, x2));
    case Kind::Cos: return std::cos(evaluate(*e.lhs, x1, x2));
    case Kind::Exp: return std::exp(evaluate(*e.lhs, x1, x2));
    case Kind::Log: return std::log(evaluate(*e.lhs, x1, x2));
    case Kind::Add: return evaluate(*e.lhs, x1, x2) + evaluate(*e.rhs, x1, x2);
    case Kind::Sub: return evaluate(*e.lhs, x1, x2) - evaluate(*e.rhs, x1, x2);
    case Kind::Mul: return evaluate(*e.lhs, x1, x2) * evaluate(*e.rhs, x1, x2);
    case Kind::Div: return evaluate(*e.lhs, x1, x2) / evaluate(*e.rhs, x1, x2);
    case Kind::Pow: {
      const double base = evaluate(*e.lhs, x1, x2);
      const double expo = evaluate(*e.rhs, x1, x2);
      if (expo == 2.0) return base * base;
      return std::pow(base, expo);
    }
  }
  throw std::logic_error("evaluate: corrupt expression node");
}

bool depends_on(const ExprNode& e, Variable var) {
  if (e.kind == Kind::Variable) return e.var == var;
  return (e.lhs && depends_on(*e.lhs, var)) || (e.rhs && depends_on(*e.rhs, var));
}

Expr differentiate(const Expr& e, Variable var) {
  switch (e->kind) {
    case Kind::Constant:
    case Kind::Pi:
      return make_constant(0.0);
    case Kind::Variable:
      return make_constant(e->var == var ? 1.0 : 0.0);
    case Kind::Neg:
      return neg(differentiate(e->lhs, var));
    case Kind::Sin:
      return mul(make_unary(Kind::Cos, e->lhs), differentiate(e->lhs, var));
    case Kind::Cos:
      return neg(mul(make_unary(Kind::Sin, e->lhs), differentiate(e->lhs, var)));
    case Kind::Exp:
      return mul(e, differentiate(e->lhs, var));
    case Kind::Log:
      return div(differentiate(e->lhs, var), e->lhs);
    case Kind::Add:
      return add(differentiate(e->lhs, var), differentiate(e->rhs, var));
    case Kind::Sub:
      return sub(differentiate(e->lhs, var), differentiate(e->rhs, var));
    case Kind::Mul:
      return add(mul(differentiate(e->lhs, var), e->rhs), mul(e->lhs, differentiate(e->rhs, var)));
    case Kind::Div: {
      // (f/g)' = f'/g - f g' / g^2
      Expr df = differentiate(e->lhs, var);
      Expr dg = differentiate(e->rhs, var);
      return sub(div(df, e->rhs), div(mul(e->lhs, dg), make_binary(Kind::Pow, e->rhs, make_constant(2.0))));
    }
    case Kind::Pow: {
      Expr df = differentiate(e->lhs, var);
      if (!depends_on(*e->rhs, Variable::X1) && !depends_on(*e->rhs, Variable::X2)) {
        // g f^(g-1) f'
        Expr lowered = is_number(e->rhs) ? make_constant(e->rhs->value - 1.0) : sub(e->rhs, make_constant(1.0));
        Expr power = is_constant(lowered, 1.0) ? e->lhs : make_binary(Kind::Pow, e->lhs, lowered);
        return mul(mul(e->rhs, power), df);
      }
      // f^g (g' log f + g f'/f)
      Expr dg = differentiate(e->rhs, var);
      return mul(e, add(mul(dg, make_unary(Kind::Log, e->lhs)), div(mul(e->rhs, df), e->lhs)));
    }
  }
  throw std::logic_error("differentiate: corrupt expression node");
}

Expr substitute(const Expr& e, Variable var, const Expr& replacement) {
  switch (e->kind) {
    case Kind::Constant:
    case Kind::Pi:
      return e;
    case Kind::Variable:
      return e->var == var ? replacement : e;
    default:
      break;
  }
  Expr lhs = e->lhs ? substitute(e->lhs, var, replacement) : nullptr;
  Expr rhs = e->rhs ? substitute(e->rhs, var, replacement) : nullptr;
  return std::make_shared<const ExprNode>(ExprNode{e->kind, e->value, e->var, std::move(lhs), std::move(rhs)});
}

std::string to_string(const ExprNode& e) {
  std::string out;
  render(e, out);
  return out;
}

}  // namespace degdiff
