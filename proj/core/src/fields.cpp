#include "pwsreg/fields.hpp"

#include <cmath>
#include <string>

#include "pwsreg/errors.hpp"

namespace pwsreg {

VectorField2::VectorField2(Expr f1, Expr f2)
    : f1_(std::move(f1)), f2_(std::move(f2)), c1_(f1_), c2_(f2_) {}

VectorField2 VectorField2::parse(std::string_view f1, std::string_view f2) {
  return {parse_expr(f1), parse_expr(f2)};
}

VectorField2 VectorField2::negated() const { return {-f1_, -f2_}; }

ScalarField::ScalarField(Expr e)
    : e_(std::move(e)), dx_(e_.diff(Var::x)), dy_(e_.diff(Var::y)), c_(e_), cdx_(dx_), cdy_(dy_) {}

ScalarField ScalarField::parse(std::string_view src) { return ScalarField(parse_expr(src)); }

LieChain::LieChain(const VectorField2& X, const ScalarField& h) : state_(std::make_shared<State>()) {
  state_->f1 = X.f1();
  state_->f2 = X.f2();
  state_->terms.push_back(X.f1() * h.dx() + X.f2() * h.dy());
  state_->compiled.push_back(std::make_shared<const CompiledExpr>(state_->terms.back()));
}

std::shared_ptr<const CompiledExpr> LieChain::ensure(int order) const {
  if (!state_) throw PreconditionError("Lie chain is not initialized");
  if (order < 1) throw PreconditionError("Lie derivative order must be >= 1");
  std::lock_guard lock(state_->mutex);
  auto& s = *state_;
  while (static_cast<int>(s.terms.size()) < order) {
    const Expr& last = s.terms.back();
    s.terms.push_back(s.f1 * last.diff(Var::x) + s.f2 * last.diff(Var::y));
    s.compiled.push_back(std::make_shared<const CompiledExpr>(s.terms.back()));
  }
  return s.compiled[static_cast<std::size_t>(order - 1)];
}

double LieChain::operator()(int order, Point2 p) const { return (*ensure(order))(p); }

Expr LieChain::expr(int order) const {
  ensure(order);
  std::lock_guard lock(state_->mutex);
  return state_->terms[static_cast<std::size_t>(order - 1)];
}

FilippovSystem::FilippovSystem(VectorField2 xplus, VectorField2 xminus, ScalarField h)
    : xplus_(std::move(xplus)),
      xminus_(std::move(xminus)),
      h_(std::move(h)),
      lie_plus_(xplus_, h_),
      lie_minus_(xminus_, h_) {}

namespace {

void require_on_sigma(const ScalarField& h, Point2 p, const SigmaTolerances& tol) {
  const double v = h(p);
  if (std::abs(v) > tol.on_sigma) {
    throw PreconditionError("point " + std::to_string(p.x) + "," + std::to_string(p.y) +
                            " is not on the switching manifold (h = " + std::to_string(v) + ")");
  }
}

Contact contact_from_chain(const LieChain& chain, Point2 p, Side side, const SigmaTolerances& tol) {
  for (int m = 1; m <= tol.max_order; ++m) {
    const double v = chain(m, p);
    if (std::abs(v) > tol.lie) {
      Contact c;
      c.multiplicity = m;
      c.leading = v;
      if (m % 2 == 0) c.visible = side == Side::plus ? v > 0.0 : v < 0.0;
      return c;
    }
  }
  throw ContactError("flat contact: no Lie derivative up to order " + std::to_string(tol.max_order) +
                     " exceeds the tolerance");
}

}  // namespace

double lie_derivative(const VectorField2& X, const ScalarField& h, Point2 p, int order,
                      const SigmaTolerances& tol) {
  if (order < 1 || order > tol.max_order) {
    throw PreconditionError("Lie derivative order " + std::to_string(order) + " outside [1, " +
                            std::to_string(tol.max_order) + "]");
  }
  return LieChain(X, h)(order, p);
}

Contact contact_multiplicity(const VectorField2& X, const ScalarField& h, Point2 p, Side side,
                             const SigmaTolerances& tol) {
  require_on_sigma(h, p, tol);
  return contact_from_chain(LieChain(X, h), p, side, tol);
}

Contact contact_multiplicity(const FilippovSystem& Z, Side side, Point2 p, const SigmaTolerances& tol) {
  require_on_sigma(Z.h(), p, tol);
  return contact_from_chain(Z.lie(side), p, side, tol);
}

SigmaClassification classify_sigma_point(const FilippovSystem& Z, Point2 p, const SigmaTolerances& tol) {
  require_on_sigma(Z.h(), p, tol);
  SigmaClassification c;
  c.lie_plus = Z.xplus_h(p);
  c.lie_minus = Z.xminus_h(p);
  const bool zp = std::abs(c.lie_plus) <= tol.lie;
  const bool zm = std::abs(c.lie_minus) <= tol.lie;
  if (zp || zm) {
    c.kind = SigmaKind::tangency;
    c.side = zp ? Side::plus : Side::minus;
    c.double_tangency = zp && zm;
    c.contact = contact_from_chain(Z.lie(c.side), p, c.side, tol);
  } else if (c.lie_plus * c.lie_minus > 0.0) {
    c.kind = SigmaKind::crossing;
  } else {
    c.kind = SigmaKind::sliding;
    c.attracting = c.lie_plus < 0.0;
  }
  return c;
}

Vec2 sliding_vector_unchecked(const FilippovSystem& Z, Point2 p) {
  const Vec2 grad = Z.h().gradient(p);
  const Vec2 xp = Z.xplus()(p);
  const Vec2 xm = Z.xminus()(p);
  const double a = dot(grad, xp);
  const double b = dot(grad, xm);
  const double den = b - a;
  return {(b * xp.x - a * xm.x) / den, (b * xp.y - a * xm.y) / den};
}

Vec2 sliding_vector(const FilippovSystem& Z, Point2 p, const SigmaTolerances& tol) {
  const SigmaClassification c = classify_sigma_point(Z, p, tol);
  if (c.kind != SigmaKind::sliding) {
    throw PreconditionError("sliding_vector called at a point that is not in the sliding region");
  }
  if (std::abs(c.lie_minus - c.lie_plus) < tol.lie) throw PreconditionError("degenerate sliding denominator");
  return sliding_vector_unchecked(Z, p);
}

const char* to_string(SigmaKind k) {
  switch (k) {
    case SigmaKind::crossing: return "crossing";
    case SigmaKind::sliding: return "sliding";
    case SigmaKind::tangency: return "tangency";
  }
  return "?";
}

const char* to_string(Side s) { return s == Side::plus ? "plus" : "minus"; }

}  // namespace pwsreg
