#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace degdiff {

enum class Variable { X1, X2 };

/// Immutable expression tree over the variables x1, x2.
///
/// Grammar (highest binding first): primaries (numbers, x1, x2, pi,
/// sin/cos/exp/log calls, parentheses), `^`, unary `-`, `*` `/`, `+` `-`.
/// Every binary tier is left-associative, so `-x1^2` is `-(x1^2)` and
/// `2^3^2` is `(2^3)^2`.
struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind { Constant, Variable, Pi, Neg, Sin, Cos, Exp, Log, Add, Sub, Mul, Div, Pow };

  Kind kind;
  double value = 0.0;  // Constant
  Variable var = Variable::X1;
  Expr lhs;  // operand of unary nodes, left operand of binary nodes
  Expr rhs;
};

/// Parse `text`; throws ParseError carrying the byte offset of the problem.
Expr parse_expression(std::string_view text);

double evaluate(const ExprNode& e, double x1, double x2 = 0.0);
inline double evaluate(const Expr& e, double x1, double x2 = 0.0) { return evaluate(*e, x1, x2); }

/// Symbolic partial derivative, with light constant folding.
Expr differentiate(const Expr& e, Variable var);

/// Replace every occurrence of `var` by `replacement`.
Expr substitute(const Expr& e, Variable var, const Expr& replacement);

/// Fully parenthesised rendering that parses back to an equivalent tree.
std::string to_string(const ExprNode& e);
inline std::string to_string(const Expr& e) { return to_string(*e); }

bool depends_on(const ExprNode& e, Variable var);

Expr make_constant(double v);
Expr make_variable(Variable v);
Expr make_unary(ExprNode::Kind kind, Expr operand);
Expr make_binary(ExprNode::Kind kind, Expr lhs, Expr rhs);

}  // namespace degdiff
