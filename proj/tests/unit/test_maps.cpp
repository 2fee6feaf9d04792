#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <pwsreg/errors.hpp>
#include <pwsreg/maps.hpp>

using namespace pwsreg;

TEST(Maps, SectionMapOfTheFold) {
  const auto X = VectorField2::parse("1", "x");
  const auto m = section_map(X, Section::vertical(0.0, {0.01, 0.02}), Section::vertical(1.0, {-10, 10}));
  EXPECT_NEAR(m(0.01), 0.51, 1e-10);
  EXPECT_NEAR(m.derivative_at(0.015), 1.0, 1e-7);
}

TEST(Maps, CoincidentSectionsGiveTheFirstReturn) {
  // Every orbit of the rotation is closed, so the first return is the identity.
  const Section s = Section::vertical(0.0, {0.1, 1.0});
  const auto m = section_map(VectorField2::parse("-y", "x"), s, s);
  for (double u : {0.2, 0.5, 0.9}) EXPECT_NEAR(m(u), u, 1e-9);
}

TEST(Maps, ComposeAndEvaluateAll) {
  const MapEvaluator a(Section::vertical(0, {0, 1}), Section::vertical(1, {0, 1}), [](double u) { return 2 * u; });
  const MapEvaluator b(Section::vertical(1, {0, 1}), Section::vertical(2, {0, 1}), [](double u) { return u + 1; });
  const auto c = compose(a, b);
  EXPECT_DOUBLE_EQ(c(0.25), 1.5);
  const std::vector<double> us{0.0, 0.1, 0.2, 0.3};
  const auto vs = c.evaluate_all(us);
  for (std::size_t i = 0; i < us.size(); ++i) EXPECT_DOUBLE_EQ(vs[i], 2 * us[i] + 1);
  EXPECT_TRUE(c.monotone_on({0, 1}));
}

TEST(Maps, LambdaStarFormula) {
  EXPECT_DOUBLE_EQ(lambda_star(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(lambda_star(2, 3), 3.0 / 9.0);
  EXPECT_DOUBLE_EQ(lambda_star(1, 3), 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(lambda_star(2, 1), 1.0);
}

TEST(Maps, AsymptoticSectionsPreconditions) {
  const auto s = asymptotic_sections(1, 1, 1.0, 0.75, 0.3, 1e-3);
  EXPECT_DOUBLE_EQ(s.lambda_star, 1.0);
  EXPECT_GT(s.y_hat, 1e-3);
  EXPECT_DOUBLE_EQ(s.v_hat.c, -0.3);
  EXPECT_NEAR(s.h_check.range.hi, -std::pow(1e-3, 0.75), 1e-15);
  EXPECT_THROW((void)asymptotic_sections(1, 1, 1.0, 1.5, 0.3, 1e-3), PreconditionError);
  EXPECT_THROW((void)asymptotic_sections(1, 1, 1.0, 0.5, 0.3, 0.0), PreconditionError);
  EXPECT_THROW((void)asymptotic_sections(1, 1, 1.0, 0.5, 0.3, 1e-3, 1.0, 0.0), PreconditionError);
}

TEST(Maps, RichardsonLimitOfLinearError) {
  std::vector<double> seq;
  for (int j = 0; j < 6; ++j) {
    const double u = std::pow(0.5, j);
    seq.push_back(2.0 + 0.3 * u + 0.05 * u * u);
  }
  const auto [v, err] = richardson_limit(seq, 2);
  EXPECT_NEAR(v, 2.0, 1e-12);
  EXPECT_LT(err, 1e-10);
}

TEST(Maps, CubicReturnMap) {
  const Scenario scn = builtin("type_b_cubic");
  // Root transfer of x² − x³ through the lower arc, checked against an
  // independent high-accuracy integration.
  EXPECT_NEAR(return_map_filippov(scn, 0.05), 0.00238638, 1e-7);
}

TEST(Maps, CircleReturnMaps) {
  EXPECT_NEAR(return_map_filippov(builtin("type_a_circle", {{"b", 0.1}}), 0.01), 0.005372, 1e-5);
  const Scenario centre = builtin("type_a_circle", {{"b", 0.0}});
  for (double u : {0.002, 0.01, 0.03}) EXPECT_NEAR(return_map_filippov(centre, u), u, 1e-8);
}

TEST(Maps, EstimateK) {
  EXPECT_NEAR(estimate_K(builtin("type_a_circle", {{"b", 0.1}})).value / std::exp(-0.2 * M_PI), 1.0, 0.02);
  EXPECT_NEAR(estimate_K(builtin("type_a_circle", {{"b", -0.1}})).value / std::exp(0.2 * M_PI), 1.0, 0.02);
  EXPECT_NEAR(estimate_K(builtin("type_b_cubic")).value, 1.0, 0.01);
  EXPECT_NEAR(estimate_K(builtin("type_a_circle", {{"b", 0.0}})).value, 1.0, 1e-4);
}

TEST(Maps, EstimateAlpha) {
  EXPECT_NEAR(estimate_alpha(VectorField2::parse("1", "x"), {0, 0}, 1).value, 1.0, 0.01);
  EXPECT_NEAR(estimate_alpha(VectorField2::parse("1", "x^3"), {0, 0}, 2).value, 1.0, 0.01);
  EXPECT_NEAR(estimate_alpha(VectorField2::parse("1 - y", "x"), {0, 0}, 1).value, 1.0, 0.01);
  EXPECT_THROW((void)estimate_alpha(VectorField2::parse("1", "x"), {0, 0}, 2), EstimationError);
}

TEST(Maps, EstimateS) {
  const auto syn = builtin("synthetic_crossing", {{"v", 1.0}});
  const auto bump = estimate_S(syn, bump_transition(1, 0.05));
  ASSERT_TRUE(bump.closed_form);
  EXPECT_NEAR(*bump.closed_form, 8 * 0.05 / 15, 1e-12);
  EXPECT_NEAR(bump.finite_difference / *bump.closed_form, 1.0, 0.05);
  EXPECT_LT(std::abs(estimate_S(syn, hermite_transition(1)).finite_difference), 1e-4);
  EXPECT_DOUBLE_EQ(estimate_S(builtin("type_a_circle"), hermite_transition(1)).value, 0.0);
  EXPECT_THROW((void)estimate_S(builtin("type_b_cubic"), hermite_transition(1)), PreconditionError);
}

TEST(Maps, TransitionMapsCollapse) {
  const Scenario circle = builtin("type_a_circle");
  const auto phi = hermite_transition(1);
  const auto U = upper_transition_map(circle, phi, 1e-3, 0.3, 0.2, 0.5);
  std::vector<double> us;
  for (int i = 0; i < 9; ++i) us.push_back(U.from().range.lo + U.from().range.width() * i / 8);
  const auto vs = U.evaluate_all(us);
  const auto [lo, hi] = std::minmax_element(vs.begin(), vs.end());
  EXPECT_LT(*hi - *lo, 1e-8);
  EXPECT_EQ(U.to().kind, Section::Kind::vertical);
  EXPECT_DOUBLE_EQ(U.to().c, 0.2);

  const Scenario cubic = builtin("type_b_cubic");
  IntegratorOptions o = map_options();
  o.rel_tol = 1e-13;
  o.abs_tol = 1e-15;
  const auto L = lower_transition_map(cubic, phi, 1e-3, 0.1, 0.2, 0.45, o);
  us.clear();
  for (int i = 0; i < 9; ++i) us.push_back(L.from().range.lo + L.from().range.width() * i / 8);
  const auto ls = L.evaluate_all(us);
  const auto [llo, lhi] = std::minmax_element(ls.begin(), ls.end());
  EXPECT_LT(*lhi - *llo, 1e-9);
  EXPECT_DOUBLE_EQ(L.to().c, 0.2);
  // Output lies just above the X⁺ tangent orbit at x = θ and within ε of it.
  const double ybar = tangent_orbit_height(cubic, 0.2);
  EXPECT_GT(*llo, ybar);
  EXPECT_LT(*lhi, ybar + 1e-3);
}

TEST(Maps, LimitConstantsOfTheCircle) {
  const auto lc = estimate_limit_constants(builtin("type_a_circle", {{"b", 0.1}}));
  ASSERT_EQ(lc.r.values.size(), 4u);
  EXPECT_TRUE(lc.r.approaches);
  EXPECT_NEAR(lc.r.predicted, std::exp(-0.2 * M_PI), 0.01);
  EXPECT_NEAR(lc.r.values.back() / lc.r.predicted, 1.0, 0.03);
  EXPECT_NEAR(lc.kappa_s.values.back(), 1.0, 0.03);
}

TEST(Maps, ExteriorMapOfCubicIsDecreasing) {
  const Scenario cubic = builtin("type_b_cubic");
  const auto D = exterior_map_eps(cubic, hermite_transition(1), 1e-3);
  const double ybar = tangent_orbit_height(cubic, cubic.polycycle.theta);
  EXPECT_TRUE(D.monotone_on({ybar, ybar + 0.02}, 16));
  EXPECT_LT(D.derivative_at(ybar + 0.01), 0.0);
}
