#include "pwsreg/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pwsreg/errors.hpp"
#include "pwsreg/parallel.hpp"

namespace pwsreg {

MapEvaluator::MapEvaluator(Section from, Section to, Fn fn, std::string label)
    : from_(from), to_(to), fn_(std::move(fn)), label_(std::move(label)) {}

double MapEvaluator::derivative_at(double u, double step) const {
  const double h = step > 0.0 ? step : std::max(1e-6, 1e-3 * std::abs(u));
  const double d1 = (fn_(u + h) - fn_(u - h)) / (2.0 * h);
  const double d2 = (fn_(u + h / 2) - fn_(u - h / 2)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

std::vector<double> MapEvaluator::evaluate_all(std::span<const double> us) const {
  return parallel_indexed(us.size(), [&](std::size_t i) { return fn_(us[i]); });
}

bool MapEvaluator::monotone_on(Interval domain, int n) const {
  std::vector<double> us(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) us[static_cast<std::size_t>(i)] = domain.lo + domain.width() * i / (n - 1);
  const std::vector<double> v = evaluate_all(us);
  bool inc = true;
  bool dec = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    inc = inc && v[i] > v[i - 1];
    dec = dec && v[i] < v[i - 1];
  }
  return inc || dec;
}

MapEvaluator compose(const MapEvaluator& first, const MapEvaluator& second) {
  std::string label = second.label() + " o " + first.label();
  return {first.from(), second.to(), [first, second](double u) { return second(first(u)); }, std::move(label)};
}

IntegratorOptions map_options() {
  IntegratorOptions o;
  o.rel_tol = 1e-11;
  o.abs_tol = 1e-13;
  o.max_step = 0.05;
  return o;
}

MapEvaluator section_map(const Flow& flow, const Section& from, const Section& to, const IntegratorOptions& opts,
                         std::vector<Section> guards, std::string label) {
  auto fn = [flow, from, to, opts, guards = std::move(guards)](double u) {
    const SectionHit hit = flow_to_section(flow, from.point(u), to, opts, false, guards);
    return to.coordinate(hit.p);
  };
  return {from, to, std::move(fn), std::move(label)};
}

MapEvaluator section_map(const VectorField2& X, const Section& from, const Section& to,
                         const IntegratorOptions& opts) {
  return section_map(Flow::of(X, Regime::plus), from, to, opts);
}

MapEvaluator filippov_section_map(const FilippovSystem& Z, const Section& from, const Section& to,
                                  const IntegratorOptions& opts, const SigmaTolerances& tol) {
  auto fn = [Z, from, to, opts, tol](double u) {
    FilippovStop stop;
    stop.section = to;
    const Trajectory tr = filippov_trajectory(Z, from.point(u), opts.max_time, opts, stop, tol);
    return to.coordinate(tr.end_point());
  };
  return {from, to, std::move(fn), "filippov"};
}

namespace {

IntegratorOptions with_window(IntegratorOptions o, const Scenario& scn) {
  if (!o.window) o.window = scn.window;
  return o;
}

Scenario with_geometry(const Scenario& scn, double rho, double theta) {
  Scenario s = scn;
  s.polycycle.rho = rho;
  s.polycycle.theta = theta;
  return s;
}

void require_polycycle(const Scenario& scn, const char* what) {
  if (scn.polycycle.type == PolycycleType::arc) {
    throw PreconditionError(std::string(what) + " needs a type (a) or (b) polycycle");
  }
}

Section wide_vertical(double x, Point2 p, Direction d = Direction::either) {
  return Section::vertical(x, {p.y - 10.0, p.y + 10.0}, d);
}

}  // namespace

double tangent_orbit_height(const Scenario& scn, double dx, const IntegratorOptions& opts) {
  const Point2 p = scn.polycycle.p;
  if (dx == 0.0) return 0.0;
  Flow f = Flow::of(scn.system.xplus(), Regime::plus);
  if (dx < 0.0) f = f.reversed();
  const SectionHit hit = flow_to_section(f, p, wide_vertical(p.x + dx, p), with_window(opts, scn), false);
  return hit.p.y - p.y;
}

double tangent_exit_abscissa(const VectorField2& xplus, Point2 p, double eps, const IntegratorOptions& opts) {
  const Section top = Section::horizontal(p.y + eps, {p.x, p.x + 10.0}, Direction::increasing);
  const SectionHit hit = flow_to_section(Flow::of(xplus, Regime::plus), p, top, opts, false);
  return hit.p.x - p.x;
}

// ---------------------------------------------------------------------------
// Filippov maps

double return_map_filippov(const Scenario& scn, double u, const IntegratorOptions& opts) {
  require_polycycle(scn, "return_map_filippov");
  const Section& sp = scn.polycycle.return_section;
  const double base = sp.coordinate(scn.polycycle.p);
  if (!(u > 0.0) || !sp.range.contains(base + u)) {
    std::ostringstream os;
    os << "return map argument " << u << " outside the return section " << sp.describe();
    throw PreconditionError(os.str());
  }
  FilippovStop stop;
  stop.section = sp;
  const IntegratorOptions o = with_window(opts, scn);
  const Trajectory tr = filippov_trajectory(scn.system, sp.point(base + u), o.max_time, o, stop);
  return sp.coordinate(tr.end_point()) - base;
}

MapEvaluator return_map(const Scenario& scn, const IntegratorOptions& opts) {
  require_polycycle(scn, "return_map");
  const Section& sp = scn.polycycle.return_section;
  return {sp, sp, [scn, opts](double u) { return return_map_filippov(scn, u, opts); }, "pi_Gamma"};
}

namespace {

struct ExteriorSections {
  Section from;
  Section to;
};

ExteriorSections exterior_sections(const Scenario& scn, double eps_section) {
  const auto& pc = scn.polycycle;
  const Point2 p = pc.p;
  switch (pc.type) {
    case PolycycleType::a:
      return {wide_vertical(p.x + pc.theta, p),
              Section::vertical(p.x - pc.rho, {p.y - 0.5, p.y + 0.5}, Direction::increasing)};
    case PolycycleType::b:
      return {wide_vertical(p.x + pc.theta, p),
              Section::horizontal(p.y - eps_section, {p.x - pc.rho, p.x + pc.delta}, Direction::increasing)};
    case PolycycleType::arc:
      break;
  }
  const Interval yr{scn.window.ymin, scn.window.ymax};
  return {Section::vertical(p.x - pc.theta, yr), Section::vertical(p.x + pc.theta, yr, Direction::increasing)};
}

}  // namespace

MapEvaluator exterior_map(const Scenario& scn, double eps_section, const IntegratorOptions& opts) {
  const ExteriorSections s = exterior_sections(scn, eps_section);
  MapEvaluator m = filippov_section_map(scn.system, s.from, s.to, with_window(opts, scn));
  return {m.from(), m.to(), [m](double u) { return m(u); }, "D"};
}

MapEvaluator exterior_map_eps(const Scenario& scn, const TransitionFn& phi, double eps,
                              const IntegratorOptions& opts) {
  const ExteriorSections s = exterior_sections(scn, eps);
  const Flow f = Flow::of(RegularizedField(scn.system, phi, eps));
  return section_map(f, s.from, s.to, with_window(opts, scn), {}, "D_eps");
}

// ---------------------------------------------------------------------------
// Asymptotic sections and transition maps

double lambda_star(int k, int n) {
  if (k < 1 || n < 1) throw PreconditionError("lambda_star needs k >= 1 and n >= 1");
  return static_cast<double>(n) / (1.0 + 2.0 * k * (n - 1));
}

AsymptoticSections asymptotic_sections(int k, int n, double alpha, double lambda, double rho, double eps, double eta,
                                       double c_beta, std::optional<double> ybar_rho) {
  AsymptoticSections out;
  out.lambda_star = lambda_star(k, n);
  if (!(lambda > 0.0 && lambda < out.lambda_star)) {
    std::ostringstream os;
    os << "lambda = " << lambda << " outside (0, lambda*) with lambda* = " << out.lambda_star;
    throw PreconditionError(os.str());
  }
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  if (!(c_beta > 0.0)) throw PreconditionError("C_beta must be positive");
  if (eta == 0.0 || (n > 2 * k - 1 && !(eta > 0.0))) {
    throw PreconditionError("eta violates its sign constraint (eta > 0 required when n > 2k-1)");
  }
  const double eps_lambda = std::pow(eps, lambda);
  if (!(rho > eps_lambda)) {
    std::ostringstream os;
    os << "rho = " << rho << " must exceed eps^lambda = " << eps_lambda;
    throw PreconditionError(os.str());
  }
  out.x_eps = eta * std::pow(eps, out.lambda_star);
  out.ybar_rho = ybar_rho.value_or(alpha * std::pow(rho, 2 * k) / (2 * k));
  out.y_hat = out.ybar_rho + eps - c_beta * std::pow(eps, 2.0 * k * lambda);
  if (!(out.y_hat > eps)) {
    std::ostringstream os;
    os << "section V-hat is empty: y_hat = " << out.y_hat << " <= eps = " << eps;
    throw PreconditionError(os.str());
  }
  out.v_hat = Section::vertical(-rho, {eps, out.y_hat}, Direction::increasing);
  out.h_check = Section::horizontal(-eps, {-rho, -eps_lambda}, Direction::increasing);
  out.tau_u = Section::vertical(0.0, {-eps, 1.0}, Direction::increasing);
  return out;
}

AsymptoticSections asymptotic_sections(const Scenario& scn, const TransitionFn& phi, double lambda, double eps) {
  require_polycycle(scn, "asymptotic_sections");
  const auto& pc = scn.polycycle;
  const double ybar = tangent_orbit_height(scn, -pc.rho);
  AsymptoticSections s = asymptotic_sections(pc.k, phi.smoothness_class(), 0.0, lambda, pc.rho, eps, pc.eta,
                                             pc.c_beta, ybar);
  const Point2 p = pc.p;
  s.y_hat += p.y;
  s.ybar_rho += p.y;
  s.v_hat = Section::vertical(p.x - pc.rho, {p.y + eps, s.y_hat}, Direction::increasing);
  s.h_check = Section::horizontal(p.y - eps, {p.x - pc.rho, p.x + s.h_check.range.hi}, Direction::increasing);
  s.tau_u = Section::vertical(p.x + pc.theta, {p.y - eps, p.y + 1.0}, Direction::increasing);
  return s;
}

namespace {

Section transition_guard(const Scenario& scn, double eps) {
  return Section::horizontal(scn.polycycle.p.y - eps, {scn.window.xmin, scn.window.xmax}, Direction::decreasing);
}

Section type_b_return_section(const Scenario& scn, double eps) {
  const auto& pc = scn.polycycle;
  return Section::horizontal(pc.p.y - eps, {pc.p.x - pc.rho, pc.p.x + pc.delta}, Direction::increasing);
}

MapEvaluator transition_map(const Scenario& scn, const TransitionFn& phi, double eps, const Section& from,
                            const Section& to, const IntegratorOptions& opts, const char* label) {
  const Section guard = transition_guard(scn, eps);
  const Flow f = Flow::of(RegularizedField(scn.system, phi, eps));
  return section_map(f, from, to, with_window(opts, scn), {guard}, label);
}

}  // namespace

MapEvaluator upper_transition_map(const Scenario& scn, const TransitionFn& phi, double eps, double rho, double theta,
                                  double lambda, const IntegratorOptions& opts) {
  const Scenario s = with_geometry(scn, rho, theta);
  const AsymptoticSections sec = asymptotic_sections(s, phi, lambda, eps);
  return transition_map(s, phi, eps, sec.v_hat, sec.tau_u, opts, "U_eps");
}

MapEvaluator lower_transition_map(const Scenario& scn, const TransitionFn& phi, double eps, double rho, double theta,
                                  double lambda, const IntegratorOptions& opts) {
  const Scenario s = with_geometry(scn, rho, theta);
  const AsymptoticSections sec = asymptotic_sections(s, phi, lambda, eps);
  return transition_map(s, phi, eps, sec.h_check, sec.tau_u, opts, "L_eps");
}

MapEvaluator return_map_eps(const Scenario& scn, const TransitionFn& phi, double eps, double lambda,
                            const IntegratorOptions& opts) {
  const auto& pc = scn.polycycle;
  if (pc.type == PolycycleType::a) {
    const MapEvaluator U = upper_transition_map(scn, phi, eps, pc.rho, pc.theta, lambda, opts);
    const MapEvaluator D = exterior_map_eps(scn, phi, eps, opts);
    MapEvaluator pi = compose(U, D);
    return {pi.from(), pi.to(), [pi](double u) { return pi(u); }, "pi_eps"};
  }
  if (pc.type == PolycycleType::b) {
    const Section s = type_b_return_section(scn, eps);
    const Flow f = Flow::of(RegularizedField(scn.system, phi, eps));
    return section_map(f, s, s, with_window(opts, scn), {}, "pi_eps");
  }
  throw PreconditionError("open arcs have no return map");
}

Trajectory return_orbit_eps(const Scenario& scn, const TransitionFn& phi, double eps, double lambda, double u,
                            double sample_spacing, const IntegratorOptions& opts) {
  const auto& pc = scn.polycycle;
  IntegratorOptions o = with_window(opts, scn);
  o.sample_spacing = sample_spacing;
  const Flow f = Flow::of(RegularizedField(scn.system, phi, eps));
  Trajectory tr;
  auto append = [&tr](SectionHit&& hit) {
    for (auto& seg : hit.traj.segments) {
      if (!tr.segments.empty() && !seg.samples.empty()) {
        for (auto& smp : seg.samples) smp.t += tr.end_time();
      }
      tr.segments.push_back(std::move(seg));
    }
    tr.events.push_back({tr.end_time(), hit.p, EventKind::section_hit});
    return hit.p;
  };
  if (pc.type == PolycycleType::a) {
    const AsymptoticSections sec = asymptotic_sections(scn, phi, lambda, eps);
    const Section guard = transition_guard(scn, eps);
    const Point2 mid = append(flow_to_section(f, sec.v_hat.point(u), sec.tau_u, o, true, std::span(&guard, 1)));
    const ExteriorSections ext = exterior_sections(scn, eps);
    append(flow_to_section(f, mid, ext.to, o, true));
    return tr;
  }
  if (pc.type == PolycycleType::b) {
    const Section s = type_b_return_section(scn, eps);
    append(flow_to_section(f, s.point(u), s, o, true));
    return tr;
  }
  throw PreconditionError("open arcs have no return map");
}

Interval return_window_eps(const Scenario& scn, const TransitionFn& phi, double eps, double lambda) {
  const auto& pc = scn.polycycle;
  if (pc.type == PolycycleType::a) return asymptotic_sections(scn, phi, lambda, eps).v_hat.range;
  if (pc.type == PolycycleType::b) return {pc.p.x - pc.rho, pc.p.x + pc.delta};
  throw PreconditionError("open arcs have no return map");
}

// ---------------------------------------------------------------------------
// Estimators

std::pair<double, double> richardson_limit(std::span<const double> seq, int levels) {
  const auto n = static_cast<int>(seq.size());
  if (n == 0) throw EstimationError("empty ladder");
  if (n == 1) return {seq[0], std::numeric_limits<double>::infinity()};
  const int L = std::min(levels, n - 1);
  std::vector<std::vector<double>> T(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(L + 1)));
  for (int j = 0; j < n; ++j) {
    T[j][0] = seq[static_cast<std::size_t>(j)];
    for (int m = 1; m <= std::min(j, L); ++m) {
      const double f = std::ldexp(1.0, m);
      T[j][m] = (f * T[j][m - 1] - T[j - 1][m - 1]) / (f - 1.0);
    }
  }
  if (n >= L + 2) {
    int best = L + 1;
    double best_diff = std::numeric_limits<double>::infinity();
    for (int j = L + 1; j < n; ++j) {
      const double d = std::abs(T[j][L] - T[j - 1][L]);
      if (d < best_diff) {
        best_diff = d;
        best = j;
      }
    }
    return {T[best][L], best_diff};
  }
  return {T[n - 1][L], std::abs(T[n - 1][L] - T[n - 1][L - 1])};
}

namespace {

// Longest run of consecutive usable rungs (halving must stay regular).
std::vector<double> longest_used_run(const std::vector<LadderRung>& rungs) {
  std::size_t best_lo = 0, best_len = 0;
  for (std::size_t i = 0; i < rungs.size();) {
    if (!rungs[i].used) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < rungs.size() && rungs[j].used) ++j;
    if (j - i > best_len) {
      best_len = j - i;
      best_lo = i;
    }
    i = j;
  }
  std::vector<double> out;
  for (std::size_t i = best_lo; i < best_lo + best_len; ++i) out.push_back(rungs[i].value);
  return out;
}

}  // namespace

Estimate estimate_K(const Scenario& scn) {
  require_polycycle(scn, "estimate_K");
  const int k = scn.polycycle.k;
  const bool type_b = scn.polycycle.type == PolycycleType::b;
  IntegratorOptions loose = map_options();
  loose.rel_tol = 1e-12;
  loose.abs_tol = 1e-15;
  IntegratorOptions tight = loose;
  tight.rel_tol = 1e-14;
  tight.abs_tol = 1e-17;
  constexpr int kRungs = 9;

  Estimate est;
  est.rungs = parallel_indexed(kRungs, [&](std::size_t j) {
    LadderRung r;
    r.u = std::ldexp(1e-2, -static_cast<int>(j));
    const double a = return_map_filippov(scn, r.u, loose);
    const double b = return_map_filippov(scn, r.u, tight);
    const double scale = type_b ? std::pow(r.u, 2 * k) : r.u;
    r.value = b / scale;
    r.error = std::abs(a - b) / scale;
    r.used = std::abs(a - b) <= 0.01 * std::abs(b);
    return r;
  });
  const std::vector<double> seq = longest_used_run(est.rungs);
  if (seq.empty()) throw EstimationError("estimate_K: integration error dominates on every rung");
  std::tie(est.value, est.error) = richardson_limit(seq, 2);
  return est;
}

Estimate estimate_alpha(const VectorField2& xplus, Point2 p, int k) {
  IntegratorOptions o = map_options();
  o.rel_tol = 1e-13;
  o.abs_tol = 1e-20;
  o.max_step = 0.01;
  constexpr int kRungs = 7;
  Estimate est;
  est.rungs = parallel_indexed(kRungs, [&](std::size_t j) {
    LadderRung r;
    r.u = std::ldexp(0.1, -static_cast<int>(j));
    const SectionHit hit = flow_to_section(Flow::of(xplus, Regime::plus), p, wide_vertical(p.x + r.u, p), o, false);
    r.value = hit.p.y - p.y;
    return r;
  });
  // Least-squares slope of log ȳ against log x.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : est.rungs) {
    if (!(r.value > 0.0)) {
      std::ostringstream os;
      os << "estimate_alpha: tangent orbit is not above Sigma at x = " << r.u << " (ybar = " << r.value << ")";
      throw EstimationError(os.str());
    }
    const double lx = std::log(r.u), ly = std::log(r.value);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = kRungs;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (std::abs(slope - 2 * k) > 0.05) {
    std::ostringstream os;
    os << "estimate_alpha: fitted exponent " << slope << " differs from 2k = " << 2 * k;
    throw EstimationError(os.str());
  }
  std::vector<double> seq;
  for (auto& r : est.rungs) {
    r.value = 2.0 * k * r.value / std::pow(r.u, 2 * k);
    seq.push_back(r.value);
  }
  std::tie(est.value, est.error) = richardson_limit(seq, 2);
  return est;
}

Estimate estimate_alpha(const Scenario& scn) {
  require_polycycle(scn, "estimate_alpha");
  return estimate_alpha(scn.system.xplus(), scn.polycycle.p, scn.polycycle.k);
}

SEstimate estimate_S(const Scenario& scn, const TransitionFn& phi) {
  const auto& pc = scn.polycycle;
  if (pc.type == PolycycleType::b) throw PreconditionError("S is defined for type (a) polycycles and open arcs");
  IntegratorOptions o = map_options();
  o.rel_tol = 1e-13;
  o.abs_tol = 1e-15;
  o.max_step = 0.01;

  SEstimate out;
  out.u_ref = pc.type == PolycycleType::a ? pc.p.y + tangent_orbit_height(scn, pc.theta, o) : pc.p.y;
  const double d0 = exterior_map(scn, 0.0, o)(out.u_ref);
  constexpr double kEps0 = 4e-3;
  out.eps = {kEps0, kEps0 / 2, kEps0 / 4};
  out.slopes = parallel_indexed(out.eps.size(), [&](std::size_t i) {
    const double e = out.eps[i];
    return (exterior_map_eps(scn, phi, e, o)(out.u_ref) - d0) / e;
  });
  out.finite_difference = richardson_limit(out.slopes, 2).first;

  if (scn.m() == 0) {
    out.closed_form = 0.0;
  } else if (scn.prepared_at_crossings) {
    double total = 0.0;
    for (const auto& q : pc.crossings) total += (scn.system.xplus()(q).y - scn.system.xminus()(q).y) / 2.0;
    out.closed_form = total * phi_integral(phi);
  }
  if (out.closed_form) {
    const double cf = *out.closed_form;
    if (std::abs(out.finite_difference - cf) > 0.05 * std::abs(cf) + 1e-6) {
      std::ostringstream os;
      os << "estimate_S: finite-difference S = " << out.finite_difference << " disagrees with closed form " << cf
         << "; the scenario is probably not in prepared coordinates";
      throw EstimationError(os.str());
    }
    out.value = cf;
  } else {
    out.value = out.finite_difference;
  }
  return out;
}

namespace {

void finish_sequence(LimitSequence& s) {
  s.approaches = true;
  for (std::size_t j = 1; j < s.values.size(); ++j) {
    if (std::abs(s.values[j] - s.predicted) > std::abs(s.values[j - 1] - s.predicted) + 1e-6) s.approaches = false;
  }
}

}  // namespace

LimitConstants estimate_limit_constants(const Scenario& scn, int rungs) {
  require_polycycle(scn, "estimate_limit_constants");
  if (rungs < 2) throw PreconditionError("limit ladder needs at least two rungs");
  const auto& pc = scn.polycycle;
  const Point2 p = pc.p;
  const int k = pc.k;
  IntegratorOptions o = with_window(map_options(), scn);
  o.rel_tol = 1e-13;
  o.abs_tol = 1e-16;
  o.max_step = 0.01;

  LimitConstants out;
  out.r.name = "r";
  out.kappa_u.name = "kappa_u";
  out.kappa_s.name = "kappa_s";
  const double K = estimate_K(scn).value;
  const auto n = static_cast<std::size_t>(rungs);
  const Flow fplus = Flow::of(scn.system.xplus(), Regime::plus);

  struct Row {
    double r, ku, ks;
  };
  std::vector<Row> rows;

  if (pc.type == PolycycleType::a) {
    for (int j = 0; j < rungs; ++j) {
      out.theta.push_back(std::ldexp(pc.theta, -j));
      out.second.push_back(std::ldexp(pc.rho, -j));
    }
    rows = parallel_indexed(n, [&](std::size_t j) {
      const double th = out.theta[j], rh = out.second[j];
      const Scenario s = with_geometry(scn, rh, th);
      const double ybar = tangent_orbit_height(s, th, o);
      Row row{};
      row.r = exterior_map(s, 0.0, o).derivative_at(p.y + ybar);
      const Section sp = wide_vertical(p.x, p);
      row.ku = section_map(fplus, sp, wide_vertical(p.x + th, p), o).derivative_at(p.y);
      row.ks = 1.0 / section_map(fplus.reversed(), sp, wide_vertical(p.x - rh, p), o).derivative_at(p.y);
      return row;
    });
    out.r.predicted = K;
    out.kappa_u.predicted = 1.0;
    out.kappa_s.predicted = 1.0;
  } else {
    constexpr double kEps0 = 4e-3;
    for (int j = 0; j < rungs; ++j) {
      out.theta.push_back(std::ldexp(pc.theta, -j));
      out.second.push_back(std::ldexp(kEps0, -j));
    }
    const double alpha = estimate_alpha(scn).value;
    rows = parallel_indexed(n, [&](std::size_t j) {
      const double th = out.theta[j], eps = out.second[j];
      const Scenario s = with_geometry(scn, pc.rho, th);
      const double ybar = tangent_orbit_height(s, th, o);
      Row row{};
      row.r = exterior_map(s, eps, o).derivative_at(p.y + ybar);
      // κ^u: limit of (T^u(x) − ȳ_θ)/x^{2k} along an x-ladder.
      const Section sigma = Section::horizontal(p.y, {p.x - 1.0, p.x + 1.0});
      const MapEvaluator Tu = section_map(fplus, sigma, wide_vertical(p.x + th, p), o);
      std::vector<double> seq;
      const double x0 = std::min(1e-2, th / 4);
      for (int i = 0; i < 7; ++i) {
        const double x = std::ldexp(x0, -i);
        seq.push_back((Tu(p.x + x) - (p.y + ybar)) / std::pow(x, 2 * k));
      }
      row.ku = richardson_limit(seq, 2).first;
      const Flow back = Flow::of(scn.system.xminus(), Regime::minus).reversed();
      const Section low = Section::horizontal(p.y - eps, {p.x - 1.0, p.x + 1.0});
      row.ks = section_map(back, sigma, low, o).derivative_at(p.x);
      return row;
    });
    out.r.predicted = -2.0 * k * K / alpha;
    out.kappa_u.predicted = -alpha / (2.0 * k);
    out.kappa_s.predicted = 1.0;
  }
  for (const auto& row : rows) {
    out.r.values.push_back(row.r);
    out.kappa_u.values.push_back(row.ku);
    out.kappa_s.values.push_back(row.ks);
  }
  finish_sequence(out.r);
  finish_sequence(out.kappa_u);
  finish_sequence(out.kappa_s);
  return out;
}

AsymptoticModel build_asymptotic_model(const Scenario& scn, const TransitionFn& phi) {
  require_polycycle(scn, "build_asymptotic_model");
  AsymptoticModel m;
  m.K = estimate_K(scn).value;
  m.alpha = estimate_alpha(scn).value;
  m.lambda_star = lambda_star(scn.polycycle.k, phi.smoothness_class());
  m.eta = scn.polycycle.eta;
  if (scn.polycycle.type == PolycycleType::a) {
    m.S = estimate_S(scn, phi).value;
    m.notes.push_back("S from estimate_S");
  } else {
    m.notes.push_back("S does not enter Theorem B; reported as 0");
  }
  const LimitConstants lc = estimate_limit_constants(scn);
  m.r_ext = lc.r.values.back();
  m.kappa_u = lc.kappa_u.values.back();
  m.kappa_s = lc.kappa_s.values.back();
  m.notes.push_back("r_ext, kappa_u, kappa_s at the finest ladder rung");
  m.notes.push_back("beta replaced by the surrogate -C_beta eps^(2k lambda)");
  return m;
}

}  // namespace pwsreg
