#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pwsreg/errors.hpp"
#include "pwsreg/fields.hpp"
#include "pwsreg/integrate.hpp"
#include "pwsreg/regularize.hpp"

namespace pwsreg {

/// Graph piece y = f(x) traversed from x_from to x_to.
struct GraphArc {
  Expr y_of_x;
  double x_from = 0.0;
  double x_to = 1.0;
};

/// Ground-truth closed curve Γ for distance measurements.
class GammaReference {
 public:
  enum class Kind { circle, graphs, samples, flow };

  GammaReference() = default;
  static GammaReference circle(Point2 center, double radius);
  static GammaReference graphs(std::vector<GraphArc> arcs);
  static GammaReference samples(std::vector<Point2> points);
  /// Placeholder resolved by validation (integration of the declared regimes).
  static GammaReference flow();

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] bool resolved() const { return kind_ != Kind::flow; }
  [[nodiscard]] Point2 center() const { return center_; }
  [[nodiscard]] double radius() const { return radius_; }
  [[nodiscard]] const std::vector<GraphArc>& arcs() const { return arcs_; }
  [[nodiscard]] const std::vector<Point2>& points() const { return points_; }

  /// Closed polyline (last point equals the first) with about `n` vertices.
  [[nodiscard]] std::vector<Point2> polyline(std::size_t n = 4096) const;
  /// Distance from q to the curve; exact for circles and graphs near the graph.
  [[nodiscard]] double distance_to(Point2 q) const;

  [[nodiscard]] GammaReference mirrored_x() const;

 private:
  Kind kind_ = Kind::flow;
  Point2 center_;
  double radius_ = 0.0;
  std::vector<GraphArc> arcs_;
  std::vector<Point2> points_;
};

/// Type (a): both tangential separatrices above Σ; type (b): one of them
/// arrives transversally from below; arc: an open exterior arc used for
/// S-coefficient experiments only.
enum class PolycycleType { a, b, arc };

struct PolycycleSpec {
  PolycycleType type = PolycycleType::a;
  Point2 p;                       // tangency point
  int k = 1;                      // contact multiplicity 2k
  std::vector<Point2> crossings;  // q_1..q_m
  GammaReference gamma;
  Section return_section;  // σ_p
  double theta = 0.2;      // τ^u = {x = p.x + θ}
  double rho = 0.3;        // τ^s = {x = p.x − ρ}
  double delta = 0.1;      // type (b): the ε-return window on {y = −ε} is [p.x − ρ, p.x + δ]
  double eta = 1.0;        // coefficient of x_ε
  double c_beta = 1.0;     // section-top surrogate constant
};

struct Scenario {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
  FilippovSystem system;
  PolycycleSpec polycycle;
  Rect window;
  bool prepared_at_crossings = false;
  std::optional<TransitionFn> transition;
  std::string notes;

  [[nodiscard]] int m() const { return static_cast<int>(polycycle.crossings.size()); }
  [[nodiscard]] double param(const std::string& key, double fallback) const;
};

/// Named builtin with parameters (unknown keys are rejected).
Scenario builtin(const std::string& name, const std::vector<std::pair<std::string, double>>& params = {});
std::vector<std::string> builtin_names();

/// Hypothesis checks in a fixed order. An empty result means valid.
struct ValidationReport {
  std::vector<Diagnostic> failures;
  std::vector<std::string> passed;
  double closure_residual = 0.0;
  [[nodiscard]] bool ok() const { return failures.empty(); }
};

ValidationReport validate_scenario(const Scenario& scn, const IntegratorOptions& opts = {},
                                   const SigmaTolerances& tol = {});
/// Validates and throws ValidationError on failure; also resolves a
/// `flow` Γ reference into samples.
void require_valid(Scenario& scn, const IntegratorOptions& opts = {}, const SigmaTolerances& tol = {});

/// Integrates the declared regimes from p once around Γ.
Trajectory trace_polycycle(const Scenario& scn, const IntegratorOptions& opts = {}, const SigmaTolerances& tol = {});

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& scn);
/// Reads, parses and validates a scenario file.
Scenario load_scenario(const std::string& path);

/// Time reversal composed with x ↦ −x; maps a failing-(a.3) scenario to
/// one satisfying it while preserving X₁⁺(p) > 0.
Scenario reverse_time(const Scenario& scn);

const char* to_string(PolycycleType t);

}  // namespace pwsreg
