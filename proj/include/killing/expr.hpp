#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "killing/jet.hpp"

namespace killing {

/// Immutable scalar expression tree over a declared list of variables.
///
/// Grammar (whitespace insignificant):
///
///     expr   := term (("+"|"-") term)*
///     term   := factor (("*"|"/") factor)*
///     factor := base ("^" number)?
///     base   := number | "pi" | ident | "(" expr ")" | func "(" expr ")" | "-" base
///     func   := sin | cos | tan | exp | log | sqrt | abs
///
/// Note that unary minus binds tighter than "^": "-x^2" is (-x)^2.
class Expr {
 public:
  enum class Kind { Constant, Variable, Unary, Binary, Power };
  enum class UnaryOp { Neg, Sin, Cos, Tan, Exp, Log, Sqrt, Abs };
  enum class BinaryOp { Add, Sub, Mul, Div };

  struct Node {
    Kind kind = Kind::Constant;
    double value = 0.0;  // constant value, or the exponent of a Power node
    int var = -1;
    UnaryOp unary = UnaryOp::Neg;
    BinaryOp binary = BinaryOp::Add;
    std::shared_ptr<const Node> lhs;  // operand of Unary/Power, left of Binary
    std::shared_ptr<const Node> rhs;
  };

  Expr() = default;

  /// Parses `text`; identifiers other than `vars`, "pi" and function names are rejected.
  /// Throws ParseError carrying the offending offset.
  static Expr parse(std::string_view text, std::vector<std::string> vars);

  const std::vector<std::string>& vars() const { return vars_; }
  const Node& root() const { return *root_; }
  bool empty() const { return root_ == nullptr; }

  /// Fully parenthesised text that re-parses to a structurally identical tree.
  std::string to_string() const;

  /// Same tree over a longer variable list; existing variables keep their index.
  Expr relabeled(std::vector<std::string> vars) const;

  /// Plain value at `point` (length must match vars()).
  double evaluate(std::span<const double> point) const;

  friend bool structurally_equal(const Expr& a, const Expr& b);

 private:
  Expr(std::shared_ptr<const Node> root, std::vector<std::string> vars)
      : root_(std::move(root)), vars_(std::move(vars)) {}

  std::shared_ptr<const Node> root_;
  std::vector<std::string> vars_;
};

/// Value, gradient and Hessian of `e` at `point`, computed with exact
/// second-order forward-mode rules. Throws DomainError (naming the offending
/// subexpression) on division by zero, log/sqrt of non-positive arguments,
/// tan at a pole, or abs within 1e-12 of its kink.
Jet eval_jet(const Expr& e, std::span<const double> point);

/// Convenience overload for at most three variables.
Jet eval_jet(const Expr& e, std::initializer_list<double> point);

std::string to_string(const Expr::Node& node, const std::vector<std::string>& vars);

}  // namespace killing
