#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pwsreg/integrate.hpp"
#include "pwsreg/regularize.hpp"
#include "pwsreg/scenarios.hpp"

namespace pwsreg {

/// One-dimensional map between two sections, realized by integration.
class MapEvaluator {
 public:
  using Fn = std::function<double(double)>;

  MapEvaluator(Section from, Section to, Fn fn, std::string label = {});

  [[nodiscard]] double operator()(double u) const { return fn_(u); }
  [[nodiscard]] double evaluate(double u) const { return fn_(u); }
  /// Central difference with step max(1e-6, 1e-3|u|) (or `step` if > 0)
  /// and one Richardson level.
  [[nodiscard]] double derivative_at(double u, double step = 0.0) const;
  /// Concurrent evaluation; output order matches input order.
  [[nodiscard]] std::vector<double> evaluate_all(std::span<const double> us) const;
  /// Strict monotonicity on an n-point grid over `domain`.
  [[nodiscard]] bool monotone_on(Interval domain, int n = 64) const;

  [[nodiscard]] const Section& from() const { return from_; }
  [[nodiscard]] const Section& to() const { return to_; }
  [[nodiscard]] const std::string& label() const { return label_; }

 private:
  Section from_;
  Section to_;
  Fn fn_;
  std::string label_;
};

/// second ∘ first.
MapEvaluator compose(const MapEvaluator& first, const MapEvaluator& second);

/// Tolerances used by the map layer unless overridden.
IntegratorOptions map_options();

MapEvaluator section_map(const Flow& flow, const Section& from, const Section& to,
                         const IntegratorOptions& opts = map_options(), std::vector<Section> guards = {},
                         std::string label = {});
MapEvaluator section_map(const VectorField2& X, const Section& from, const Section& to,
                         const IntegratorOptions& opts = map_options());
/// Map realized by the Filippov flow (regime switching on Σ).
MapEvaluator filippov_section_map(const FilippovSystem& Z, const Section& from, const Section& to,
                                  const IntegratorOptions& opts = map_options(), const SigmaTolerances& tol = {});

/// Ordinate (relative to p.y) of the X⁺ orbit through p at abscissa p.x + dx.
double tangent_orbit_height(const Scenario& scn, double dx, const IntegratorOptions& opts = map_options());
/// Abscissa offset where the X⁺ orbit through p reaches height p.y + ε.
double tangent_exit_abscissa(const VectorField2& xplus, Point2 p, double eps,
                             const IntegratorOptions& opts = map_options());

/// First return of the Filippov flow to σ_p.
double return_map_filippov(const Scenario& scn, double u, const IntegratorOptions& opts = map_options());
MapEvaluator return_map(const Scenario& scn, const IntegratorOptions& opts = map_options());

/// Exterior map along the regular part of Γ: τ^u → τ^s (type a), τ^u → {y = p.y − ε}
/// (type b), {x = p.x − θ} → {x = p.x + θ} (arc).
MapEvaluator exterior_map(const Scenario& scn, double eps_section = 0.0, const IntegratorOptions& opts = map_options());
MapEvaluator exterior_map_eps(const Scenario& scn, const TransitionFn& phi, double eps,
                              const IntegratorOptions& opts = map_options());

struct AsymptoticSections {
  double lambda_star = 0.0;
  double x_eps = 0.0;
  double y_hat = 0.0;   // top of V̂, absolute ordinate
  double ybar_rho = 0.0;
  Section v_hat;        // {p.x − ρ} × [p.y + ε, y_hat]
  Section h_check;      // [p.x − ρ, p.x − ε^λ] × {p.y − ε}
  Section tau_u;        // {x = p.x + θ}
};

double lambda_star(int k, int n);

/// Section geometry for given (k, n, λ, ρ, ε). ybar_rho defaults to αρ^{2k}/(2k).
AsymptoticSections asymptotic_sections(int k, int n, double alpha, double lambda, double rho, double eps,
                                       double eta = 1.0, double c_beta = 1.0,
                                       std::optional<double> ybar_rho = std::nullopt);
/// Same, with p, θ and the exact ȳ_{−ρ} taken from the scenario.
AsymptoticSections asymptotic_sections(const Scenario& scn, const TransitionFn& phi, double lambda, double eps);

/// U_ε : V̂ → {x = p.x + θ}.
MapEvaluator upper_transition_map(const Scenario& scn, const TransitionFn& phi, double eps, double rho, double theta,
                                  double lambda, const IntegratorOptions& opts = map_options());
/// L_ε : Ȟ → {x = p.x + θ}.
MapEvaluator lower_transition_map(const Scenario& scn, const TransitionFn& phi, double eps, double rho, double theta,
                                  double lambda, const IntegratorOptions& opts = map_options());

/// π_ε: D_ε ∘ U_ε on V̂ (type a); first return of Z_ε to {y = p.y − ε} on
/// [p.x − ρ, p.x + δ] (type b).
MapEvaluator return_map_eps(const Scenario& scn, const TransitionFn& phi, double eps, double lambda,
                            const IntegratorOptions& opts = map_options());
/// Orbit of Z_ε realizing π_ε(u), recorded leg by leg.
Trajectory return_orbit_eps(const Scenario& scn, const TransitionFn& phi, double eps, double lambda, double u,
                            double sample_spacing = 1e-3, const IntegratorOptions& opts = map_options());
/// Scan interval of π_ε.
Interval return_window_eps(const Scenario& scn, const TransitionFn& phi, double eps, double lambda);

struct LadderRung {
  double u = 0.0;
  double value = 0.0;
  double error = 0.0;
  bool used = true;
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;
  std::vector<LadderRung> rungs;
};

/// Richardson table over a halving ladder; returns {value, error}.
std::pair<double, double> richardson_limit(std::span<const double> seq, int levels = 2);

Estimate estimate_K(const Scenario& scn);
Estimate estimate_alpha(const VectorField2& xplus, Point2 p, int k);
Estimate estimate_alpha(const Scenario& scn);

struct SEstimate {
  double value = 0.0;                // reported S
  double finite_difference = 0.0;
  std::optional<double> closed_form;
  double u_ref = 0.0;
  std::vector<double> eps;
  std::vector<double> slopes;        // (D_ε − D)/ε per ε
};

/// Throws EstimationError when both estimates exist and disagree.
SEstimate estimate_S(const Scenario& scn, const TransitionFn& phi);

struct LimitSequence {
  std::string name;
  std::vector<double> values;
  double predicted = 0.0;
  bool approaches = false;  // |value − predicted| nonincreasing (slack 1e-6)
};

struct LimitConstants {
  std::vector<double> theta;
  std::vector<double> second;  // ρ (type a) or ε (type b) per rung
  LimitSequence r;
  LimitSequence kappa_u;
  LimitSequence kappa_s;
};

LimitConstants estimate_limit_constants(const Scenario& scn, int rungs = 4);

struct AsymptoticModel {
  double K = 0.0;
  double S = 0.0;
  double alpha = 0.0;
  std::string beta = "surrogate";
  double r_ext = 0.0;
  double kappa_u = 0.0;
  double kappa_s = 0.0;
  double lambda_star = 0.0;
  double eta = 1.0;
  std::vector<std::string> notes;
};

AsymptoticModel build_asymptotic_model(const Scenario& scn, const TransitionFn& phi);

}  // namespace pwsreg
