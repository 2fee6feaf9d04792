#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pwsreg/types.hpp"

namespace pwsreg {

enum class Var { x, y };

/// Immutable expression tree in the variables x and y.
///
/// Nodes are shared, so an Expr is cheap to copy and safe to read from
/// several threads. Constructors fold constants but perform no other
/// simplification.
class Expr {
 public:
  enum class Op : std::uint8_t { constant, var_x, var_y, neg, sin, cos, exp, add, sub, mul, div, pow };

  struct Node;

  Expr();  // the constant 0
  Expr(double value);  // NOLINT(google-explicit-constructor)

  static Expr constant(double value);
  static Expr variable(Var v);
  static Expr x() { return variable(Var::x); }
  static Expr y() { return variable(Var::y); }

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& base, unsigned exponent);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr exp(const Expr& a);

  [[nodiscard]] Op op() const;
  [[nodiscard]] bool is_constant() const { return op() == Op::constant; }
  [[nodiscard]] double constant_value() const;  // requires is_constant()
  [[nodiscard]] unsigned exponent() const;      // requires op() == pow
  [[nodiscard]] Expr child(std::size_t i) const;
  [[nodiscard]] std::size_t arity() const;

  /// Recursive evaluation; throws DomainError on a zero denominator.
  [[nodiscard]] double eval(Point2 p) const;

  [[nodiscard]] Expr diff(Var v) const;

  /// Replaces every occurrence of `v` by `with`.
  [[nodiscard]] Expr substitute(Var v, const Expr& with) const;

  /// Text that parse_expr() reads back to an equivalent tree.
  [[nodiscard]] std::string to_string() const;

  /// Number of distinct nodes (shared subtrees counted once).
  [[nodiscard]] std::size_t node_count() const;

  /// True when both trees have the same shape and constants.
  [[nodiscard]] bool same_as(const Expr& other) const;

  [[nodiscard]] const Node* node() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Op op, Expr a, Expr b = {}, unsigned exponent = 0);

  std::shared_ptr<const Node> node_;
};

Expr parse_expr(std::string_view src);
double eval_expr(const Expr& e, Point2 p);
Expr diff_expr(const Expr& e, Var v);

/// Flattened form of an Expr for repeated evaluation.
///
/// Shared subtrees are evaluated once, which keeps long Lie-derivative
/// chains linear in their DAG size.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  explicit CompiledExpr(const Expr& e);

  [[nodiscard]] double operator()(Point2 p) const;
  [[nodiscard]] std::size_t size() const { return code_.size(); }

 private:
  struct Instr {
    Expr::Op op;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double value = 0.0;  // constant value, or exponent for pow
  };
  std::vector<Instr> code_;
};

}  // namespace pwsreg
