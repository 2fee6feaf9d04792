#include <gtest/gtest.h>

#include <cmath>

#include <pwsreg/analysis.hpp>
#include <pwsreg/errors.hpp>

using namespace pwsreg;

namespace {

MapEvaluator map_of(MapEvaluator::Fn fn) {
  return {Section::vertical(0, {0, 1}), Section::vertical(0, {0, 1}), std::move(fn)};
}

std::vector<Point2> circle_points(double r, int n, double phase = 0.0) {
  std::vector<Point2> pts;
  for (int i = 0; i <= n; ++i) {
    const double t = phase + 2 * M_PI * i / n;
    pts.push_back({r * std::cos(t), r * std::sin(t)});
  }
  pts.back() = pts.front();
  return pts;
}

}  // namespace

TEST(Analysis, LinearFixedPoint) {
  const auto fps = find_fixed_points(map_of([](double u) { return u / 2 + 0.1; }), {0, 1});
  ASSERT_EQ(fps.size(), 1u);
  EXPECT_NEAR(fps[0].location, 0.2, 1e-12);
  EXPECT_NEAR(fps[0].derivative, 0.5, 1e-8);
  EXPECT_EQ(fps[0].stability, Stability::stable);
}

TEST(Analysis, NoFixedPoint) {
  EXPECT_TRUE(find_fixed_points(map_of([](double u) { return u + 0.1; }), {0, 1}).empty());
}

TEST(Analysis, SeveralFixedPointsInOrder) {
  const auto fps = find_fixed_points(map_of([](double u) { return u + 0.05 * std::sin(10 * u); }), {0.1, 1.0}, 64);
  ASSERT_EQ(fps.size(), 3u);
  EXPECT_NEAR(fps[0].location, M_PI / 10, 1e-11);
  EXPECT_EQ(fps[0].stability, Stability::stable);
  EXPECT_NEAR(fps[1].location, 2 * M_PI / 10, 1e-11);
  EXPECT_EQ(fps[1].stability, Stability::unstable);
  EXPECT_LT(fps[0].location, fps[1].location);
}

TEST(Analysis, Hausdorff) {
  EXPECT_NEAR(hausdorff_distance(circle_points(1.0, 500), circle_points(1.1, 700, 0.3)), 0.1, 1e-4);
  EXPECT_NEAR(hausdorff_distance(circle_points(1.0, 500), circle_points(1.0, 500)), 0.0, 1e-12);
}

TEST(Analysis, DefaultsFollowTheContactOrder) {
  EXPECT_EQ(default_eps_list(1), (std::vector<double>{8e-4, 4e-4, 2e-4, 1e-4}));
  EXPECT_EQ(default_eps_list(2).size(), 4u);
  EXPECT_DOUBLE_EQ(default_lambda(1, 1), 0.75);
  const double l = default_lambda(2, 3);
  EXPECT_GT(l, 0.25);
  EXPECT_LT(l, lambda_star(2, 3));
}

TEST(Analysis, CycleSearchOnTheCircle) {
  const auto phi = hermite_transition(1);
  const auto found = limit_cycle_search(builtin("type_a_circle", {{"b", 0.1}}), phi, 1e-3, 0.75);
  ASSERT_EQ(found.fixed_points.size(), 1u);
  ASSERT_TRUE(found.selected);
  EXPECT_EQ(found.selected->stability, Stability::stable);
  ASSERT_TRUE(found.cycle);
  EXPECT_LT(found.closure, 1e-8);

  const auto none = limit_cycle_search(builtin("type_a_circle", {{"b", -0.1}}), phi, 1e-3, 0.75);
  EXPECT_TRUE(none.fixed_points.empty());
  EXPECT_FALSE(none.cycle);
}

TEST(Analysis, CycleSearchOnTheCubic) {
  const auto found = limit_cycle_search(builtin("type_b_cubic"), hermite_transition(1), 1e-3, 0.5);
  EXPECT_GE(found.fixed_points.size(), 1u);
  EXPECT_TRUE(found.cycle);
}

TEST(Analysis, CycleApproachesGamma) {
  const Scenario scn = builtin("type_a_circle", {{"b", 0.1}});
  const auto gamma = scn.polycycle.gamma.polyline();
  const auto phi = hermite_transition(1);
  const auto a = limit_cycle_search(scn, phi, 2e-3, 0.75);
  const auto b = limit_cycle_search(scn, phi, 1e-3, 0.75);
  ASSERT_TRUE(a.cycle && b.cycle);
  EXPECT_LT(hausdorff_distance(*b.cycle, gamma), hausdorff_distance(*a.cycle, gamma));
}

TEST(Analysis, SweepPreconditions) {
  const Scenario scn = builtin("type_a_circle");
  const auto phi = hermite_transition(1);
  EXPECT_THROW((void)epsilon_sweep(scn, phi, {1e-3, 5e-4}, 0.75), PreconditionError);
  EXPECT_THROW((void)epsilon_sweep(scn, phi, {1e-4, 2e-4, 4e-4, 8e-4}, 0.75), PreconditionError);
}

TEST(Analysis, TheoremAVerdicts) {
  const auto phi = hermite_transition(1);
  const auto yes = theorem_a_verdict(builtin("type_a_circle", {{"b", 0.1}}), phi, 0.75, default_eps_list(1));
  EXPECT_TRUE(yes.agree);
  EXPECT_LT(yes.discriminant, 0.0);
  ASSERT_EQ(yes.sweep.rows.size(), 4u);
  for (const auto& r : yes.sweep.rows) EXPECT_EQ(r.fixed_points.size(), 1u);
  EXPECT_GE(yes.sweep.convergence_exponent, 0.9);

  const auto no = theorem_a_verdict(builtin("type_a_circle", {{"b", -0.1}}), phi, 0.75, default_eps_list(1));
  EXPECT_TRUE(no.agree);
  EXPECT_GT(no.discriminant, 0.0);

  const auto centre = theorem_a_verdict(builtin("type_a_circle", {{"b", 0.0}}), phi, 0.75, default_eps_list(1));
  EXPECT_TRUE(centre.inconclusive);
  EXPECT_FALSE(centre.agree);
}

TEST(Analysis, TheoremBVerdicts) {
  const Scenario cubic = builtin("type_b_cubic");
  EXPECT_TRUE(theorem_b_verdict(cubic, hermite_transition(1), default_eps_list(1)).agree);
  EXPECT_TRUE(theorem_b_verdict(cubic, bump_transition(1, 0.05), default_eps_list(1)).agree);
  EXPECT_THROW((void)theorem_b_verdict(builtin("type_a_circle"), hermite_transition(1), default_eps_list(1)),
               PreconditionError);
  EXPECT_THROW((void)theorem_a_verdict(cubic, hermite_transition(1), 0.75, default_eps_list(1)), PreconditionError);
}

TEST(Analysis, Proposition1) {
  const auto phi = hermite_transition(1);
  EXPECT_TRUE(prop1_verdict(builtin("type_a_circle", {{"b", 0.1}}), phi, default_eps_list(1), 0.75).agree);
  EXPECT_TRUE(prop1_verdict(builtin("type_a_circle", {{"b", -0.1}}), phi, default_eps_list(1), 0.75).agree);
  const auto iso = isocline_check(builtin("type_a_circle", {{"b", 0.1}}), 0.05);
  EXPECT_TRUE(iso.ok) << iso.message;
  EXPECT_EQ(iso.rows, 21);
}
