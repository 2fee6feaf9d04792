// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <pwsreg/pwsreg.hpp>

using namespace pwsreg;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return !v.empty();
}

std::vector<double> hausdorff_of(const Verdict& v) {
  std::vector<double> d;
  for (const auto& r : v.sweep.rows) d.push_back(r.hausdorff_to_gamma);
  return d;
}

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (std::log(xs[i]) - mx) * (std::log(ys[i]) - my);
    sxx += (std::log(xs[i]) - mx) * (std::log(xs[i]) - mx);
  }
  return sxy / sxx;
}

double spread(const MapEvaluator& m, int n) {
  const Interval d = m.from().range;
  std::vector<double> us;
  for (int i = 0; i < n; ++i) us.push_back(d.lo + d.width() * i / (n - 1));
  const auto vs = m.evaluate_all(us);
  const auto [lo, hi] = std::minmax_element(vs.begin(), vs.end());
  return *hi - *lo;
}

IntegratorOptions tight() {
  IntegratorOptions o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-15;
  return o;
}

// 1. Sliding vector tangent to Σ on random polynomial systems.
void sliding_invariant(Outcome& out) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  auto poly = [&](double lead) {
    std::ostringstream os;
    os.precision(17);
    os << lead << " + " << c(rng) << "*x + " << c(rng) << "*y + " << c(rng) << "*x^2 + " << c(rng) << "*x*y + "
       << c(rng) << "*y^2";
    return os.str();
  };
  double worst = 0.0;
  int points = 0;
  for (int sys = 0; sys < 20; ++sys) {
    const double a = c(rng), b = c(rng);
    std::ostringstream hs;
    hs.precision(17);
    hs << "y - (" << a << "*x + " << b << "*x^2)";
    const FilippovSystem Z(VectorField2::parse(poly(0.0), poly(-3.0)), VectorField2::parse(poly(0.0), poly(3.0)),
                           ScalarField::parse(hs.str()));
    int here = 0;
    for (int tries = 0; here < 50 && tries < 100000; ++tries) {
      const double x = c(rng);
      const Point2 p{x, a * x + b * x * x};
      if (classify_sigma_point(Z, p).kind != SigmaKind::sliding) continue;
      const Vec2 v = sliding_vector(Z, p);
      worst = std::max(worst, std::abs(dot(Z.h().gradient(p), v)) / (1.0 + norm(v)));
      ++here;
    }
    points += here;
  }
  out.detail << "points=" << points << " max |<grad h, Zs>|/(1+|Zs|)=" << worst;
  out.require(points == 1000, "1000 sliding points");
  out.require(worst <= 1e-12, "tangency within 1e-12");
}

// 2. Tangent orbit asymptotics.
void tangent_asymptotics(Outcome& out) {
  for (int k : {1, 2}) {
    const auto X = VectorField2::parse("1", k == 1 ? "x" : "x^3");
    std::vector<double> xs, ys;
    for (int j = 0; j < 7; ++j) {
      const double x = 0.1 * std::pow(0.5, j);
      xs.push_back(x);
      ys.push_back(flow_to_section(X, {0, 0}, Section::vertical(x, {-1, 1}), tight()).p.y);
    }
    const double slope = least_squares_slope(xs, ys);
    const double alpha = estimate_alpha(X, {0, 0}, k).value;
    out.detail << "k=" << k << ": exponent " << slope << ", alpha " << alpha << "; ";
    out.require(std::abs(slope - 2 * k) <= 0.05, "exponent 2k +- 0.05");
    out.require(std::abs(alpha - 1.0) <= 0.01, "alpha = 1 +- 1%");
  }
  const auto fold = VectorField2::parse("1", "x");
  double worst = 0.0;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const auto hit = flow_to_section(fold, {0, 0}, Section::horizontal(eps, {0, 1}, Direction::increasing), tight());
    worst = std::max(worst, std::abs(hit.p.x / std::sqrt(2 * eps) - 1.0));
  }
  out.detail << "max rel error of exit abscissa vs sqrt(2 eps): " << worst;
  out.require(worst <= 1e-6, "exit abscissa within 1e-6");
}

// 3. Existence branch.
void theorem_a_existence(Outcome& out) {
  const Scenario scn = builtin("type_a_circle", {{"b", 0.1}});
  const Verdict v = theorem_a_verdict(scn, hermite_transition(1), 0.75, {8e-4, 4e-4, 2e-4, 1e-4});
  bool one_each = true;
  double worst_deriv = 0.0;
  for (const auto& r : v.sweep.rows) {
    one_each = one_each && r.fixed_points.size() == 1;
    for (const auto& fp : r.fixed_points) worst_deriv = std::max(worst_deriv, std::abs(fp.derivative));
  }
  const auto d = hausdorff_of(v);
  const double target = std::exp(-0.2 * M_PI);
  out.detail << "K=" << v.K << " (target " << target << "), S=" << v.S << ", max |pi'|=" << worst_deriv
             << ", Hausdorff " << d[0] << " -> " << d.back() << ", slope " << v.sweep.convergence_exponent
             << ", agree=" << v.agree;
  out.require(one_each, "exactly one fixed point per eps");
  out.require(worst_deriv < 1.0, "|pi'| < 1");
  out.require(strictly_decreasing(d), "Hausdorff strictly decreasing");
  out.require(v.sweep.convergence_exponent >= 0.9, "log-log slope >= 0.9");
  out.require(std::abs(v.K / target - 1.0) <= 0.02, "K within 2%");
  out.require(v.S == 0.0, "S = 0 exactly");
  out.require(v.agree, "verdict agrees");
}

// 4. Nonexistence branch.
void theorem_a_nonexistence(Outcome& out) {
  const Scenario scn = builtin("type_a_circle", {{"b", -0.1}});
  const Verdict v = theorem_a_verdict(scn, hermite_transition(1), 0.75, {8e-4, 4e-4, 2e-4, 1e-4});
  std::size_t found = 0;
  for (const auto& r : v.sweep.rows) found += r.fixed_points.size();
  const double target = std::exp(0.2 * M_PI);
  out.detail << "K=" << v.K << " (target " << target << "), fixed points over all eps: " << found
             << ", agree=" << v.agree;
  out.require(found == 0, "no fixed points");
  out.require(std::abs(v.K / target - 1.0) <= 0.02, "K within 2%");
  out.require(v.agree, "verdict agrees");
}

// 5. Hyperbolicity and global scan.
void proposition_1(Outcome& out) {
  const auto phi = hermite_transition(1);
  const std::vector<double> eps{8e-4, 4e-4, 2e-4, 1e-4};
  const Scenario stable = builtin("type_a_circle", {{"b", 0.1}});
  const Verdict a = prop1_verdict(stable, phi, eps, 0.75);
  const Verdict b = prop1_verdict(builtin("type_a_circle", {{"b", -0.1}}), phi, eps, 0.75);
  const IsoclineCheck iso = isocline_check(stable, 8e-4);
  double max_d = -1.0;
  for (const auto& [k, val] : a.metrics) {
    if (k == "max_abs_derivative") max_d = val;
  }
  out.detail << "b=0.1: " << a.observation << "; b=-0.1: " << b.observation << "; isocline: " << iso.message;
  out.require(a.agree && max_d >= 0.0 && max_d <= 0.9, "b=0.1 unique hyperbolic cycle");
  out.require(b.agree, "b=-0.1 none found");
  out.require(iso.ok, "isocline uniqueness");
}

// 6. Type (b) cycles and the unperturbed return map.
void theorem_b(Outcome& out) {
  const Scenario scn = builtin("type_b_cubic");
  const std::vector<double> eps{8e-4, 4e-4, 2e-4, 1e-4};
  for (const auto& phi : {hermite_transition(1), bump_transition(1, 0.05)}) {
    const Verdict v = theorem_b_verdict(scn, phi, eps);
    bool cycles = true;
    for (const auto& r : v.sweep.rows) cycles = cycles && !r.fixed_points.empty() && r.cycle.has_value();
    const auto d = hausdorff_of(v);
    out.detail << phi.label() << ": Hausdorff " << d[0] << " -> " << d.back() << "; ";
    out.require(cycles, phi.label() + " cycle per eps");
    out.require(strictly_decreasing(d), phi.label() + " distances strictly decreasing");
    out.require(v.agree, phi.label() + " verdict agrees");
  }
  // Closed-form reduction of the return: w(1 − w)² = u² − u³, root near 0.
  const double u = 0.05;
  const double target = u * u - u * u * u;
  double lo = 0.0, hi = 0.1;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * (1 - mid) * (1 - mid) < target ? lo : hi) = mid;
  }
  const double oracle = 0.5 * (lo + hi);
  const double got = return_map_filippov(scn, u);
  out.detail << "pi_Gamma(0.05)=" << got << ", closed-form root " << oracle
             << " (quoted literal 0.0023813 is not reachable by that reduction)";
  out.require(std::abs(got - oracle) <= 1e-6, "pi_Gamma matches closed-form root within 1e-6");
}

// 7. S coefficient.
void s_formula(Outcome& out) {
  const Scenario syn = builtin("synthetic_crossing", {{"v", 1.0}});
  const SEstimate bump = estimate_S(syn, bump_transition(1, 0.05));
  const SEstimate herm = estimate_S(syn, hermite_transition(1));
  const double closed = 8 * 0.05 / 15;
  out.detail << "bump FD " << bump.finite_difference << " vs 8c/15 = " << closed << "; hermite FD "
             << herm.finite_difference << ", closed " << herm.closed_form.value_or(NAN);
  out.require(std::abs(bump.finite_difference / closed - 1.0) <= 0.05, "bump within 5%");
  out.require(std::abs(herm.finite_difference) < 1e-4 && herm.closed_form && *herm.closed_form == 0.0,
              "hermite gives 0");
}

// 8. Limit-constant sequences.
void limit_constants(Outcome& out) {
  const Scenario circle = builtin("type_a_circle", {{"b", 0.1}});
  const double K = estimate_K(circle).value;
  const LimitConstants a = estimate_limit_constants(circle);
  std::vector<double> gaps;
  for (double r : a.r.values) gaps.push_back(std::abs(r - K));
  out.detail << "circle |r - K|:";
  for (double g : gaps) out.detail << ' ' << g;
  out.require(strictly_decreasing(gaps), "|r - K| decreasing");

  const Scenario cubic = builtin("type_b_cubic");
  const double alpha = estimate_alpha(cubic).value;
  const double Kb = estimate_K(cubic).value;
  const int k = cubic.polycycle.k;
  const LimitConstants b = estimate_limit_constants(cubic);
  const double ku_target = -alpha / (2 * k);
  const double r_target = -2 * k * Kb / alpha;
  out.detail << "; cubic alpha=" << alpha << ", kappa_u -> " << b.kappa_u.values.back() << " (target " << ku_target
             << "), r -> " << b.r.values.back() << " (target " << r_target
             << "); quoted -1/2 and -2 assume alpha = 1, while this arc has alpha = 2";
  out.require(std::abs(b.kappa_u.values.back() / ku_target - 1.0) <= 0.03, "kappa_u within 3%");
  out.require(std::abs(b.r.values.back() / r_target - 1.0) <= 0.05, "r within 5%");
}

// 9. Collapse of the transition maps.
void transition_collapse(Outcome& out) {
  const auto phi = hermite_transition(1);
  const Scenario circle = builtin("type_a_circle");
  const Scenario cubic = builtin("type_b_cubic");
  IntegratorOptions fine = map_options();
  fine.rel_tol = 1e-13;
  fine.abs_tol = 1e-15;
  std::vector<double> u_ratio, l_ratio;
  for (double eps : {4e-3, 2e-3, 1e-3}) {
    const auto U = upper_transition_map(circle, phi, eps, circle.polycycle.rho, circle.polycycle.theta, 0.5);
    const auto L = lower_transition_map(cubic, phi, eps, cubic.polycycle.rho, cubic.polycycle.theta, 0.45, fine);
    u_ratio.push_back(spread(U, 9) / (eps * eps * eps));
    l_ratio.push_back(spread(L, 9) / (eps * eps * eps));
  }
  out.detail << "U (lambda 0.5) spread/eps^3:";
  for (double r : u_ratio) out.detail << ' ' << r;
  out.detail << "; L (lambda 0.45) spread/eps^3:";
  for (double r : l_ratio) out.detail << ' ' << r;
  out.require(strictly_decreasing(u_ratio), "U ratios decrease");
  out.require(strictly_decreasing(l_ratio), "L ratios decrease");
}

// 10. Regularization exactness and smoothness class.
void regularization(Outcome& out) {
  const FilippovSystem Z(VectorField2::parse("1 - y + x*y", "x - y^2"), VectorField2::parse("cos(x)", "1 + x^2"),
                         ScalarField::parse("y - x^3/2"));
  const double eps = 0.05;
  const auto Zeps = regularized_field(Z, bump_transition(2, 0.05), eps);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int points = 0, mismatches = 0;
  while (points < 10000) {
    const Point2 p{u(rng), u(rng)};
    const double hv = Z.h()(p);
    if (std::abs(hv) < eps) continue;
    const Vec2 want = hv > 0 ? Z.xplus()(p) : Z.xminus()(p);
    const Vec2 got = Zeps(p);
    if (got.x != want.x || got.y != want.y) ++mismatches;
    ++points;
  }
  out.detail << points << " points, " << mismatches << " mismatches; ";
  out.require(mismatches == 0, "bit-identical outside the band");
  for (int n : {1, 2, 3}) {
    const auto phi = hermite_transition(n);
    bool smooth = true;
    for (int i = 1; i <= n; ++i) {
      smooth = smooth && std::abs(phi.derivative(i, 1.0)) < 1e-9 && std::abs(phi.derivative(i, -1.0)) < 1e-9;
    }
    const bool exact_class = std::abs(phi.derivative(n + 1, 1.0)) > 1e-6;
    // One-sided first differences of Z_ε across h = ±ε along the normal.
    const auto Zn = regularized_field(Z, phi, eps);
    double jump = 0.0;
    const double d = 1e-6;
    for (double side : {1.0, -1.0}) {
      const Point2 p{0.0, side * eps};
      const Vec2 l = (1.0 / d) * (Zn(p) - Zn({0.0, side * eps - d}));
      const Vec2 r = (1.0 / d) * (Zn({0.0, side * eps + d}) - Zn(p));
      jump = std::max(jump, norm(l - r));
    }
    out.detail << "n=" << n << " C^n " << (smooth && exact_class ? "yes" : "no") << ", slope jump " << jump << "; ";
    out.require(smooth && exact_class, "class C^" + std::to_string(n));
    out.require(jump < 1e-3, "continuous first derivative at the band edge");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"sliding vector tangent to the switching curve", sliding_invariant},
      {"tangent orbit asymptotics", tangent_asymptotics},
      {"existence branch, type (a)", theorem_a_existence},
      {"nonexistence branch, type (a)", theorem_a_nonexistence},
      {"hyperbolic cycle and global scan", proposition_1},
      {"type (b) cycles", theorem_b},
      {"S coefficient", s_formula},
      {"limit constants", limit_constants},
      {"transition-map collapse", transition_collapse},
      {"regularization exactness", regularization},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && out.pass;
    std::printf("criterion %zu: %s (%s, %.1f s): %s\n", i + 1, out.pass ? "PASS" : "FAIL", criteria[i].first, secs,
                out.detail.str().c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
