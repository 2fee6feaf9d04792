#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pwsreg/maps.hpp"

namespace pwsreg {

enum class Stability { stable, unstable, marginal };

struct FixedPointResult {
  double location = 0.0;
  double derivative = 0.0;
  Stability stability = Stability::marginal;
  Interval bracket{0.0, 0.0};
  double residual = 0.0;
};

/// Brackets every sign change of map(u) − u on an n-point grid and bisects
/// to 1e-12. Tangential fixed points are not detected.
std::vector<FixedPointResult> find_fixed_points(const MapEvaluator& map, Interval window, int grid_n = 32);

struct CycleSearch {
  Interval window{0.0, 0.0};
  std::vector<FixedPointResult> fixed_points;
  std::optional<FixedPointResult> selected;
  std::optional<Trajectory> cycle;
  double closure = 0.0;
};

/// Fixed points of π_ε in its scan window; the cycle through the selected one
/// (the first stable, else the first) is integrated once around.
CycleSearch limit_cycle_search(const Scenario& scn, const TransitionFn& phi, double eps, double lambda,
                               int grid_n = 32);

/// Symmetric Hausdorff distance between two closed polylines, each resampled
/// by arclength to 4000 points.
double hausdorff_distance(const std::vector<Point2>& a, const std::vector<Point2>& b);
double hausdorff_distance(const Trajectory& a, const std::vector<Point2>& b);

struct SweepRow {
  double eps = 0.0;
  std::vector<FixedPointResult> fixed_points;
  double hausdorff_to_gamma = 0.0;  // NaN without a cycle
  double K_eff = 0.0;               // NaN without a cycle
  double closure = 0.0;
  std::optional<Trajectory> cycle;
  std::string error;                // non-empty when the row failed
};

struct SweepReport {
  std::vector<SweepRow> rows;
  double convergence_exponent = 0.0;
  double r2 = 0.0;
};

std::vector<double> default_eps_list(int k);
/// Midpoint of (1/(2k), λ*).
double default_lambda(int k, int n);

/// Rows are computed concurrently. Γ given as a flow placeholder is resolved first.
SweepReport epsilon_sweep(const Scenario& scn, const TransitionFn& phi, const std::vector<double>& eps_list,
                          double lambda);

struct Verdict {
  std::string theorem;  // "A", "B", "Prop1"
  double K = 0.0;
  double S = 0.0;
  double discriminant = 0.0;
  int k = 1;
  int n = 1;
  std::optional<double> lambda;
  std::string prediction;
  std::string observation;
  bool agree = false;
  bool inconclusive = false;
  SweepReport sweep;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> notes;
};

Verdict theorem_a_verdict(const Scenario& scn, const TransitionFn& phi, double lambda,
                          const std::vector<double>& eps_list);
Verdict theorem_b_verdict(const Scenario& scn, const TransitionFn& phi, const std::vector<double>& eps_list);
Verdict prop1_verdict(const Scenario& scn, const TransitionFn& phi, const std::vector<double>& eps_list,
                      double lambda);

struct IsoclineCheck {
  bool ok = false;
  int rows = 0;
  std::string message;
};

/// X⁺h(x, y) = 0 must have exactly one root in the window's x-range for every
/// y on a grid of [p.y, p.y + y_max], with contact order 2k at p.
IsoclineCheck isocline_check(const Scenario& scn, double y_max);

const char* to_string(Stability s);

}  // namespace pwsreg
