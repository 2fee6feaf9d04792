#include "pwsreg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pwsreg/errors.hpp"
#include "pwsreg/parallel.hpp"

namespace pwsreg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Stability classify_stability(double d) {
  if (std::abs(d) < 1.0 - 1e-3) return Stability::stable;
  if (std::abs(d) > 1.0 + 1e-3) return Stability::unstable;
  return Stability::marginal;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::vector<FixedPointResult> find_fixed_points(const MapEvaluator& map, Interval window, int grid_n) {
  if (grid_n < 2) throw PreconditionError("fixed point grid needs at least two nodes");
  if (!(window.hi > window.lo)) throw PreconditionError("fixed point window is empty");
  std::vector<double> us(static_cast<std::size_t>(grid_n));
  for (int i = 0; i < grid_n; ++i) us[static_cast<std::size_t>(i)] = window.lo + window.width() * i / (grid_n - 1);
  const std::vector<double> vs = map.evaluate_all(us);

  std::vector<Interval> brackets;
  for (std::size_t i = 0; i + 1 < us.size(); ++i) {
    const double ga = vs[i] - us[i];
    const double gb = vs[i + 1] - us[i + 1];
    if (ga == 0.0) brackets.push_back({us[i], us[i]});
    else if ((ga < 0.0) != (gb < 0.0) && gb != 0.0) brackets.push_back({us[i], us[i + 1]});
  }
  if (vs.back() == us.back()) brackets.push_back({us.back(), us.back()});

  return parallel_indexed(brackets.size(), [&](std::size_t j) {
    Interval b = brackets[j];
    FixedPointResult r;
    r.bracket = b;
    double lo = b.lo, hi = b.hi;
    double glo = map(lo) - lo;
    while (hi - lo > 1e-12 * std::max(1.0, std::abs(lo))) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double gm = map(mid) - mid;
      if (gm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((gm < 0.0) == (glo < 0.0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    r.location = 0.5 * (lo + hi);
    r.residual = std::abs(map(r.location) - r.location);
    r.derivative = map.derivative_at(r.location);
    r.stability = classify_stability(r.derivative);
    return r;
  });
}

CycleSearch limit_cycle_search(const Scenario& scn, const TransitionFn& phi, double eps, double lambda, int grid_n) {
  CycleSearch out;
  out.window = return_window_eps(scn, phi, eps, lambda);
  const MapEvaluator pi = return_map_eps(scn, phi, eps, lambda);
  out.fixed_points = find_fixed_points(pi, out.window, grid_n);
  for (const auto& fp : out.fixed_points) {
    if (fp.stability == Stability::stable) {
      out.selected = fp;
      break;
    }
  }
  if (!out.selected && !out.fixed_points.empty()) out.selected = out.fixed_points.front();
  if (out.selected) {
    Trajectory tr = return_orbit_eps(scn, phi, eps, lambda, out.selected->location);
    const std::vector<Point2> pts = tr.points();
    out.closure = distance(pts.front(), pts.back());
    if (out.closure > 1e-8) {
      std::ostringstream os;
      os << "limit cycle does not close: residual " << out.closure << " at eps = " << eps;
      throw EstimationError(os.str());
    }
    out.cycle = std::move(tr);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hausdorff distance

namespace {

std::vector<Point2> resample_closed(const std::vector<Point2>& pts, std::size_t n) {
  if (pts.size() < 2) throw PreconditionError("curve needs at least two points");
  if (distance(pts.front(), pts.back()) > 1e-8) throw PreconditionError("hausdorff_distance needs closed curves");
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) cum[i] = cum[i - 1] + distance(pts[i - 1], pts[i]);
  const double total = cum.back();
  std::vector<Point2> out;
  out.reserve(n + 1);
  if (total == 0.0) {
    out.assign(2, pts.front());
    return out;
  }
  std::size_t seg = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = total * static_cast<double>(i) / static_cast<double>(n);
    while (seg + 1 < cum.size() && cum[seg] < s) ++seg;
    const double len = cum[seg] - cum[seg - 1];
    const double t = len > 0.0 ? (s - cum[seg - 1]) / len : 0.0;
    out.push_back(pts[seg - 1] + t * (pts[seg] - pts[seg - 1]));
  }
  out.push_back(out.front());
  return out;
}

double point_segment(Point2 q, Point2 a, Point2 b) {
  const Vec2 ab = b - a;
  const double l2 = dot(ab, ab);
  const double t = l2 > 0.0 ? std::clamp(dot(q - a, ab) / l2, 0.0, 1.0) : 0.0;
  return distance(q, a + t * ab);
}

double directed(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  const std::vector<double> per = parallel_indexed(a.size(), [&](std::size_t i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < b.size(); ++j) best = std::min(best, point_segment(a[i], b[j], b[j + 1]));
    return best;
  });
  return *std::max_element(per.begin(), per.end());
}

}  // namespace

double hausdorff_distance(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  constexpr std::size_t kSamples = 4000;
  const std::vector<Point2> ra = resample_closed(a, kSamples);
  const std::vector<Point2> rb = resample_closed(b, kSamples);
  return std::max(directed(ra, rb), directed(rb, ra));
}

double hausdorff_distance(const Trajectory& a, const std::vector<Point2>& b) {
  return hausdorff_distance(a.points(), b);
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<double> default_eps_list(int k) {
  if (k <= 1) return {8e-4, 4e-4, 2e-4, 1e-4};
  return {64e-4, 32e-4, 16e-4, 8e-4};
}

double default_lambda(int k, int n) { return 0.5 * (1.0 / (2.0 * k) + lambda_star(k, n)); }

namespace {

Scenario resolved(const Scenario& scn) {
  Scenario s = scn;
  if (!s.polycycle.gamma.resolved()) require_valid(s);
  return s;
}

double reference_coordinate(const Scenario& scn) {
  const auto& pc = scn.polycycle;
  if (pc.type == PolycycleType::a) return pc.p.y + tangent_orbit_height(scn, -pc.rho);
  return pc.p.x;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

}  // namespace

SweepReport epsilon_sweep(const Scenario& scn_in, const TransitionFn& phi, const std::vector<double>& eps_list,
                          double lambda) {
  if (eps_list.size() < 4) throw PreconditionError("epsilon sweep needs at least 4 values");
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) throw PreconditionError("epsilon list must be strictly decreasing");
  }
  const Scenario scn = resolved(scn_in);
  const std::vector<Point2> gamma = scn.polycycle.gamma.polyline();
  const double ref = reference_coordinate(scn);

  SweepReport rep;
  rep.rows = parallel_indexed(eps_list.size(), [&](std::size_t i) {
    SweepRow row;
    row.eps = eps_list[i];
    row.hausdorff_to_gamma = kNaN;
    row.K_eff = kNaN;
    try {
      CycleSearch cs = limit_cycle_search(scn, phi, row.eps, lambda);
      row.fixed_points = cs.fixed_points;
      if (cs.cycle) {
        row.closure = cs.closure;
        row.hausdorff_to_gamma = hausdorff_distance(*cs.cycle, gamma);
        row.K_eff = (cs.selected->location - ref) / row.eps;
        row.cycle = std::move(cs.cycle);
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    return row;
  });

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = 0;
  for (const auto& row : rep.rows) {
    if (!(row.hausdorff_to_gamma > 0.0)) continue;
    const double lx = std::log(row.eps), ly = std::log(row.hausdorff_to_gamma);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
    ++n;
  }
  if (n >= 2) {
    const double cov = n * sxy - sx * sy;
    const double vx = n * sxx - sx * sx;
    const double vy = n * syy - sy * sy;
    rep.convergence_exponent = cov / vx;
    rep.r2 = vy > 0.0 ? cov * cov / (vx * vy) : 1.0;
  } else {
    rep.convergence_exponent = kNaN;
    rep.r2 = kNaN;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Verdicts

namespace {

void require_type(const Scenario& scn, PolycycleType t, const char* theorem) {
  if (scn.polycycle.type != t) {
    throw PreconditionError(std::string(theorem) + " needs a type (" + to_string(t) + ") polycycle, got type (" +
                            to_string(scn.polycycle.type) + ")");
  }
}

void require_hypotheses(const Scenario& scn) {
  const ValidationReport rep = validate_scenario(scn);
  if (!rep.ok()) throw ValidationError(rep.failures);
}

std::string row_errors(const SweepReport& rep) {
  std::string out;
  for (const auto& r : rep.rows) {
    if (!r.error.empty()) out += " [eps=" + fmt(r.eps) + ": " + r.error + "]";
  }
  return out;
}

std::vector<double> distances(const SweepReport& rep) {
  std::vector<double> d;
  for (const auto& r : rep.rows) d.push_back(r.hausdorff_to_gamma);
  return d;
}

}  // namespace

Verdict theorem_a_verdict(const Scenario& scn, const TransitionFn& phi, double lambda,
                          const std::vector<double>& eps_list) {
  require_type(scn, PolycycleType::a, "Theorem A");
  require_hypotheses(scn);
  Verdict v;
  v.theorem = "A";
  v.k = scn.polycycle.k;
  v.n = phi.smoothness_class();
  v.lambda = lambda;
  if (v.n < 2 * v.k - 1) {
    throw PreconditionError("Theorem A needs n >= 2k-1 (n = " + std::to_string(v.n) + ", k = " +
                            std::to_string(v.k) + ")");
  }
  v.K = estimate_K(scn).value;
  v.S = estimate_S(scn, phi).value;
  v.discriminant = v.K + v.S - 1.0;
  const double lstar = lambda_star(v.k, v.n);
  if (v.discriminant < -0.02 && !(lambda > 1.0 / (2 * v.k) && lambda < lstar)) {
    std::ostringstream os;
    os << "existence branch of Theorem A needs lambda in (1/(2k), lambda*) = (" << 1.0 / (2 * v.k) << ", " << lstar
       << "), got " << lambda;
    throw PreconditionError(os.str());
  }
  v.sweep = epsilon_sweep(scn, phi, eps_list, lambda);
  const std::string errs = row_errors(v.sweep);

  std::vector<std::size_t> counts;
  bool all_stable = true;
  for (const auto& r : v.sweep.rows) {
    counts.push_back(r.fixed_points.size());
    for (const auto& fp : r.fixed_points) all_stable = all_stable && fp.stability == Stability::stable;
  }
  std::ostringstream obs;
  obs << "fixed points per eps:";
  for (auto c : counts) obs << ' ' << c;

  if (std::abs(v.discriminant) <= 0.02) {
    v.inconclusive = true;
    v.prediction = "inconclusive: K+S-1 = " + fmt(v.discriminant) + " lies within +-0.02 of 0";
    v.observation = obs.str() + errs;
    v.agree = false;
    return v;
  }
  if (v.discriminant < 0.0) {
    v.prediction = "unique asymptotically stable limit cycle through H-hat for every eps, converging to Gamma";
    const bool one_each = std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c == 1; });
    const bool converging = strictly_decreasing(distances(v.sweep));
    obs << "; all stable: " << (all_stable ? "yes" : "no") << "; Hausdorff strictly decreasing: "
        << (converging ? "yes" : "no") << "; exponent " << fmt(v.sweep.convergence_exponent);
    v.agree = one_each && all_stable && converging && errs.empty();
  } else {
    v.prediction = "no limit cycle through H-hat for any eps";
    v.agree = std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c == 0; }) && errs.empty();
  }
  v.observation = obs.str() + errs;
  return v;
}

Verdict theorem_b_verdict(const Scenario& scn, const TransitionFn& phi, const std::vector<double>& eps_list) {
  require_type(scn, PolycycleType::b, "Theorem B");
  require_hypotheses(scn);
  Verdict v;
  v.theorem = "B";
  v.k = scn.polycycle.k;
  v.n = phi.smoothness_class();
  v.K = estimate_K(scn).value;
  v.S = 0.0;
  v.discriminant = v.K - 1.0;
  v.notes.push_back("S and the discriminant do not enter Theorem B");
  const double lambda = default_lambda(v.k, v.n);
  v.sweep = epsilon_sweep(scn, phi, eps_list, lambda);
  const std::string errs = row_errors(v.sweep);
  v.prediction = "at least one limit cycle for every eps, converging to Gamma";
  bool each = true;
  std::ostringstream obs;
  obs << "fixed points per eps:";
  for (const auto& r : v.sweep.rows) {
    obs << ' ' << r.fixed_points.size();
    each = each && !r.fixed_points.empty();
  }
  const bool converging = strictly_decreasing(distances(v.sweep));
  obs << "; Hausdorff strictly decreasing: " << (converging ? "yes" : "no") << "; exponent "
      << fmt(v.sweep.convergence_exponent);
  v.observation = obs.str() + errs;
  v.agree = each && converging && errs.empty();
  return v;
}

IsoclineCheck isocline_check(const Scenario& scn, double y_max) {
  const auto& pc = scn.polycycle;
  const Point2 p = pc.p;
  const FilippovSystem& Z = scn.system;
  constexpr int kRows = 21;
  constexpr int kGrid = 2000;
  IsoclineCheck out;
  std::ostringstream msg;
  const double xlo = scn.window.xmin, xhi = scn.window.xmax;
  for (int j = 0; j < kRows; ++j) {
    const double y = p.y + y_max * j / (kRows - 1);
    int roots = 0;
    double prev = Z.xplus_h({xlo + (xhi - xlo) * 0.5 / kGrid, y});
    for (int i = 1; i < kGrid; ++i) {
      const double g = Z.xplus_h({xlo + (xhi - xlo) * (i + 0.5) / kGrid, y});
      if ((g < 0.0) != (prev < 0.0)) ++roots;
      prev = g;
    }
    ++out.rows;
    if (roots != 1) {
      msg << "y = " << y << ": " << roots << " roots of X+h; ";
      out.message = msg.str();
      return out;
    }
  }
  try {
    const Contact c = contact_multiplicity(Z, Side::plus, p);
    if (c.multiplicity != 2 * pc.k || !c.visible) {
      out.message = "contact order at p is " + std::to_string(c.multiplicity) + ", expected " +
                    std::to_string(2 * pc.k);
      return out;
    }
  } catch (const Error& e) {
    out.message = e.what();
    return out;
  }
  out.ok = true;
  out.message = "unique isocline root on every grid row; contact order " + std::to_string(2 * pc.k) + " at p";
  return out;
}

Verdict prop1_verdict(const Scenario& scn_in, const TransitionFn& phi, const std::vector<double>& eps_list,
                      double lambda) {
  require_type(scn_in, PolycycleType::a, "Proposition 1");
  require_hypotheses(scn_in);
  const Scenario scn = resolved(scn_in);
  Verdict v;
  v.theorem = "Prop1";
  v.k = scn.polycycle.k;
  v.n = phi.smoothness_class();
  v.lambda = lambda;
  const IsoclineCheck iso = isocline_check(scn, *std::max_element(eps_list.begin(), eps_list.end()));
  if (!iso.ok) throw PreconditionError("isocline check failed: " + iso.message);
  v.notes.push_back(iso.message);
  v.K = estimate_K(scn).value;
  v.S = estimate_S(scn, phi).value;
  v.discriminant = v.K + v.S - 1.0;

  const bool expanding = v.discriminant > 0.02 && v.K > 1.0;
  const bool contracting = v.discriminant < -0.02 && v.K < 1.0;
  if (!expanding && !contracting) {
    v.inconclusive = true;
    v.prediction = "Proposition 1 does not apply: signs of K+S-1 and K-1 differ or K+S-1 is within +-0.02 of 0";
    v.observation = "not evaluated";
    return v;
  }

  const double ref = reference_coordinate(scn);
  const int widths[] = {2, 8, 32};
  struct Scan {
    std::vector<double> found;  // distinct fixed point locations over all windows
    double max_abs_derivative = 0.0;
    std::size_t stable = 0;
    std::string error;
  };
  const std::vector<Scan> scans = parallel_indexed(eps_list.size(), [&](std::size_t i) {
    Scan s;
    const double eps = eps_list[i];
    try {
      const MapEvaluator pi = return_map_eps(scn, phi, eps, lambda);
      for (int w : widths) {
        const Interval win{std::max(ref - w * eps, scn.polycycle.p.y + eps), ref + w * eps};
        for (const auto& fp : find_fixed_points(pi, win, 32)) {
          const bool seen = std::any_of(s.found.begin(), s.found.end(), [&](double x) {
            return std::abs(x - fp.location) <= 1e-9 * std::max(1.0, std::abs(x));
          });
          if (!seen) {
            s.found.push_back(fp.location);
            if (fp.stability == Stability::stable) ++s.stable;
          }
        }
      }
      if (contracting) {
        const Interval final_win{std::max(ref - 32 * eps, scn.polycycle.p.y + eps), ref + 32 * eps};
        std::vector<double> grid(33);
        for (int g = 0; g <= 32; ++g) grid[static_cast<std::size_t>(g)] = final_win.lo + final_win.width() * g / 32;
        const std::vector<double> ds =
            parallel_indexed(grid.size(), [&](std::size_t g) { return std::abs(pi.derivative_at(grid[g])); });
        s.max_abs_derivative = *std::max_element(ds.begin(), ds.end());
      }
    } catch (const Error& e) {
      s.error = e.what();
    }
    return s;
  });

  std::ostringstream obs;
  obs << "fixed points per eps (windows W = 2, 8, 32):";
  bool ok = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < scans.size(); ++i) {
    obs << ' ' << scans[i].found.size();
    if (!scans[i].error.empty()) {
      obs << " [eps=" << fmt(eps_list[i]) << ": " << scans[i].error << "]";
      ok = false;
    }
    worst = std::max(worst, scans[i].max_abs_derivative);
    if (expanding) ok = ok && scans[i].found.empty();
    if (contracting) ok = ok && scans[i].found.size() == 1 && scans[i].stable == 1;
  }
  if (expanding) {
    v.prediction = "no limit cycle converging to Gamma (global window scan)";
  } else {
    v.prediction = "unique hyperbolic stable limit cycle converging to Gamma";
    obs << "; max grid |pi_eps'| = " << fmt(worst);
    ok = ok && worst <= 0.9;
    v.metrics.emplace_back("max_abs_derivative", worst);
  }
  v.observation = obs.str();
  v.agree = ok;
  return v;
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::marginal: return "marginal";
  }
  return "?";
}

}  // namespace pwsreg
