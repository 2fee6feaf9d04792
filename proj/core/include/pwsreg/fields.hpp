#pragma once

#include <memory>
#include <mutex>
#include <string_view>
#include <vector>

#include "pwsreg/expr.hpp"
#include "pwsreg/types.hpp"

namespace pwsreg {

/// Thresholds used when deciding that a value on Σ "is zero".
struct SigmaTolerances {
  double on_sigma = 1e-10;  // |h(p)| accepted as p ∈ Σ
  double lie = 1e-9;        // |X^i h(p)| accepted as a vanishing Lie derivative
  int max_order = 8;
};

/// Planar vector field with symbolic components.
class VectorField2 {
 public:
  VectorField2() = default;
  VectorField2(Expr f1, Expr f2);
  static VectorField2 parse(std::string_view f1, std::string_view f2);

  [[nodiscard]] Vec2 operator()(Point2 p) const { return {c1_(p), c2_(p)}; }
  [[nodiscard]] const Expr& f1() const { return f1_; }
  [[nodiscard]] const Expr& f2() const { return f2_; }

  /// The field with both components negated (time reversal).
  [[nodiscard]] VectorField2 negated() const;

 private:
  Expr f1_;
  Expr f2_;
  CompiledExpr c1_;
  CompiledExpr c2_;
};

/// Switching function h with its symbolic gradient.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(Expr e);
  static ScalarField parse(std::string_view src);

  [[nodiscard]] double operator()(Point2 p) const { return c_(p); }
  [[nodiscard]] Vec2 gradient(Point2 p) const { return {cdx_(p), cdy_(p)}; }
  [[nodiscard]] const Expr& expr() const { return e_; }
  [[nodiscard]] const Expr& dx() const { return dx_; }
  [[nodiscard]] const Expr& dy() const { return dy_; }

 private:
  Expr e_;
  Expr dx_;
  Expr dy_;
  CompiledExpr c_;
  CompiledExpr cdx_;
  CompiledExpr cdy_;
};

/// Symbolic chain X h, X²h, ... built on demand and shared between copies.
class LieChain {
 public:
  LieChain() = default;
  LieChain(const VectorField2& X, const ScalarField& h);

  /// X^order h at p; order ≥ 1.
  [[nodiscard]] double operator()(int order, Point2 p) const;
  [[nodiscard]] Expr expr(int order) const;

 private:
  struct State {
    Expr f1;
    Expr f2;
    std::mutex mutex;
    std::vector<Expr> terms;  // terms[i] = X^{i+1} h
    std::vector<std::shared_ptr<const CompiledExpr>> compiled;
  };
  std::shared_ptr<const CompiledExpr> ensure(int order) const;
  std::shared_ptr<State> state_;
};

enum class Side { plus, minus };

/// Result of contact_multiplicity.
struct Contact {
  int multiplicity = 0;
  bool visible = false;  // meaningful for even multiplicity only
  double leading = 0.0;  // X^m h(p)
};

/// Z = (X⁺, X⁻) separated by Σ = h⁻¹(0); X⁺ acts where h > 0.
class FilippovSystem {
 public:
  FilippovSystem() = default;
  FilippovSystem(VectorField2 xplus, VectorField2 xminus, ScalarField h);

  [[nodiscard]] const VectorField2& xplus() const { return xplus_; }
  [[nodiscard]] const VectorField2& xminus() const { return xminus_; }
  [[nodiscard]] const ScalarField& h() const { return h_; }
  [[nodiscard]] const VectorField2& field(Side s) const { return s == Side::plus ? xplus_ : xminus_; }
  [[nodiscard]] const LieChain& lie(Side s) const { return s == Side::plus ? lie_plus_ : lie_minus_; }

  /// First Lie derivatives ⟨∇h, X^±⟩ evaluated without the symbolic chain.
  [[nodiscard]] double xplus_h(Point2 p) const { return dot(h_.gradient(p), xplus_(p)); }
  [[nodiscard]] double xminus_h(Point2 p) const { return dot(h_.gradient(p), xminus_(p)); }

 private:
  VectorField2 xplus_;
  VectorField2 xminus_;
  ScalarField h_;
  LieChain lie_plus_;
  LieChain lie_minus_;
};

enum class SigmaKind { crossing, sliding, tangency };

struct SigmaClassification {
  SigmaKind kind = SigmaKind::crossing;
  bool attracting = false;  // sliding only: X⁺h < 0 < X⁻h
  Side side = Side::plus;   // tangency only: the tangent field
  bool double_tangency = false;
  Contact contact;  // tangency only
  double lie_plus = 0.0;
  double lie_minus = 0.0;
};

double lie_derivative(const VectorField2& X, const ScalarField& h, Point2 p, int order,
                      const SigmaTolerances& tol = {});

/// Contact order of X with Σ at p. `side` selects the visibility rule.
Contact contact_multiplicity(const VectorField2& X, const ScalarField& h, Point2 p, Side side = Side::plus,
                             const SigmaTolerances& tol = {});
Contact contact_multiplicity(const FilippovSystem& Z, Side side, Point2 p, const SigmaTolerances& tol = {});

SigmaClassification classify_sigma_point(const FilippovSystem& Z, Point2 p, const SigmaTolerances& tol = {});

Vec2 sliding_vector(const FilippovSystem& Z, Point2 p, const SigmaTolerances& tol = {});

/// Sliding field without the region check; used by integrators.
Vec2 sliding_vector_unchecked(const FilippovSystem& Z, Point2 p);

const char* to_string(SigmaKind k);
const char* to_string(Side s);

}  // namespace pwsreg
