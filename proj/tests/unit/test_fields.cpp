#include <gtest/gtest.h>

#include <random>

#include <pwsreg/errors.hpp>
#include <pwsreg/fields.hpp>

using namespace pwsreg;

namespace {

FilippovSystem cubic_system() {
  return {VectorField2::parse("1", "2*x - 3*x^2"), VectorField2::parse("-1", "1 - 2*x"), ScalarField::parse("y")};
}

}  // namespace

TEST(Fields, LieDerivativeChains) {
  const ScalarField h = ScalarField::parse("y");
  const auto fold = VectorField2::parse("1", "x");
  EXPECT_DOUBLE_EQ(lie_derivative(fold, h, {0, 0}, 1), 0.0);
  EXPECT_DOUBLE_EQ(lie_derivative(fold, h, {0, 0}, 2), 1.0);

  const auto cusp = VectorField2::parse("1", "x^3");
  for (int i = 1; i <= 3; ++i) EXPECT_DOUBLE_EQ(lie_derivative(cusp, h, {0, 0}, i), 0.0);
  EXPECT_DOUBLE_EQ(lie_derivative(cusp, h, {0, 0}, 4), 6.0);

  EXPECT_DOUBLE_EQ(lie_derivative(VectorField2::parse("1 - y", "x"), h, {0, 0}, 2), 1.0);
}

TEST(Fields, ContactMultiplicity) {
  const ScalarField h = ScalarField::parse("y");
  auto c = contact_multiplicity(VectorField2::parse("1", "x"), h, {0, 0});
  EXPECT_EQ(c.multiplicity, 2);
  EXPECT_TRUE(c.visible);

  c = contact_multiplicity(VectorField2::parse("1", "x^3"), h, {0, 0});
  EXPECT_EQ(c.multiplicity, 4);
  EXPECT_TRUE(c.visible);
  EXPECT_DOUBLE_EQ(c.leading, 6.0);

  c = contact_multiplicity(VectorField2::parse("-1", "1 - 2*x"), h, {0.5, 0}, Side::minus);
  EXPECT_EQ(c.multiplicity, 2);
  EXPECT_FALSE(c.visible);

  c = contact_multiplicity(VectorField2::parse("1", "1"), h, {0, 0});
  EXPECT_EQ(c.multiplicity, 1);
}

TEST(Fields, DegenerateContactThrows) {
  EXPECT_THROW((void)contact_multiplicity(VectorField2::parse("1", "0"), ScalarField::parse("y"), {0, 0}),
               ContactError);
}

TEST(Fields, ClassifiesTheCubicSystem) {
  const auto Z = cubic_system();
  auto c = classify_sigma_point(Z, {1, 0});
  EXPECT_EQ(c.kind, SigmaKind::crossing);
  EXPECT_DOUBLE_EQ(c.lie_plus, -1.0);
  EXPECT_DOUBLE_EQ(c.lie_minus, -1.0);

  c = classify_sigma_point(Z, {0.6, 0});
  EXPECT_EQ(c.kind, SigmaKind::sliding);

  c = classify_sigma_point(Z, {0, 0});
  EXPECT_EQ(c.kind, SigmaKind::tangency);
  EXPECT_EQ(c.side, Side::plus);
  EXPECT_EQ(c.contact.multiplicity, 2);
  EXPECT_TRUE(c.contact.visible);

  c = classify_sigma_point(Z, {0.5, 0});
  EXPECT_EQ(c.kind, SigmaKind::tangency);
  EXPECT_EQ(c.side, Side::minus);
}

TEST(Fields, SlidingVector) {
  const ScalarField h = ScalarField::parse("y");
  const FilippovSystem a(VectorField2::parse("1", "-1"), VectorField2::parse("0", "1"), h);
  const Vec2 va = sliding_vector(a, {0, 0});
  EXPECT_DOUBLE_EQ(va.x, 0.5);
  EXPECT_DOUBLE_EQ(va.y, 0.0);

  const Vec2 vb = sliding_vector(cubic_system(), {0.6, 0});
  EXPECT_NEAR(vb.x, 0.25, 1e-15);
  EXPECT_NEAR(vb.y, 0.0, 1e-15);

  const FilippovSystem c(VectorField2::parse("1", "-1"), VectorField2::parse("1", "1"), h);
  for (double x : {-3.0, 0.0, 2.5}) {
    const Vec2 v = sliding_vector(c, {x, 0});
    EXPECT_DOUBLE_EQ(v.x, 1.0);
    EXPECT_DOUBLE_EQ(v.y, 0.0);
  }
}

TEST(Fields, SlidingVectorOutsideSlidingRegionIsRejected) {
  EXPECT_THROW((void)sliding_vector(cubic_system(), {0.2, 0}), PreconditionError);
}

TEST(Fields, SlidingVectorIsTangentOnCurvedSigma) {
  const FilippovSystem Z(VectorField2::parse("1 - x", "-1 - y"), VectorField2::parse("y", "1 + x^2"),
                         ScalarField::parse("y - x^2/2"));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  int tested = 0;
  for (int i = 0; i < 400; ++i) {
    const double x = u(rng);
    const Point2 p{x, x * x / 2};
    if (classify_sigma_point(Z, p).kind != SigmaKind::sliding) continue;
    const Vec2 v = sliding_vector(Z, p);
    EXPECT_LE(std::abs(dot(Z.h().gradient(p), v)), 1e-12 * (1.0 + norm(v)));
    ++tested;
  }
  EXPECT_GT(tested, 50);
}

TEST(Fields, NegatedField) {
  const auto X = VectorField2::parse("1 - y", "x").negated();
  const Vec2 v = X({2.0, 3.0});
  EXPECT_DOUBLE_EQ(v.x, 2.0);
  EXPECT_DOUBLE_EQ(v.y, -2.0);
}
