#include "pwsreg/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace pwsreg {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// GammaReference

GammaReference GammaReference::circle(Point2 center, double radius) {
  GammaReference g;
  g.kind_ = Kind::circle;
  g.center_ = center;
  g.radius_ = radius;
  return g;
}

GammaReference GammaReference::graphs(std::vector<GraphArc> arcs) {
  GammaReference g;
  g.kind_ = Kind::graphs;
  g.arcs_ = std::move(arcs);
  return g;
}

GammaReference GammaReference::samples(std::vector<Point2> points) {
  GammaReference g;
  g.kind_ = Kind::samples;
  g.points_ = std::move(points);
  return g;
}

GammaReference GammaReference::flow() { return {}; }

std::vector<Point2> GammaReference::polyline(std::size_t n) const {
  std::vector<Point2> out;
  switch (kind_) {
    case Kind::circle: {
      out.reserve(n + 1);
      // Start at the bottom of the circle so the tangency point is a vertex.
      for (std::size_t i = 0; i < n; ++i) {
        const double a = -std::numbers::pi / 2 + 2.0 * std::numbers::pi * static_cast<double>(i) / n;
        out.push_back({center_.x + radius_ * std::cos(a), center_.y + radius_ * std::sin(a)});
      }
      break;
    }
    case Kind::graphs: {
      const std::size_t per = std::max<std::size_t>(2, n / std::max<std::size_t>(1, arcs_.size()));
      for (const auto& arc : arcs_) {
        const CompiledExpr f(arc.y_of_x);
        for (std::size_t i = 0; i < per; ++i) {
          if (i == 0 && !out.empty()) continue;
          const double x = arc.x_from + (arc.x_to - arc.x_from) * static_cast<double>(i) / (per - 1);
          out.push_back({x, f({x, 0.0})});
        }
      }
      if (!out.empty() && distance(out.front(), out.back()) < 1e-12) out.pop_back();
      break;
    }
    case Kind::samples:
      out = points_;
      if (!out.empty() && out.front() == out.back()) out.pop_back();
      break;
    case Kind::flow:
      throw PreconditionError("Gamma reference has not been regenerated yet");
  }
  if (!out.empty()) out.push_back(out.front());
  return out;
}

namespace {

double point_segment_distance(Point2 q, Point2 a, Point2 b) {
  const Vec2 ab = b - a;
  const double l2 = dot(ab, ab);
  double t = l2 > 0.0 ? dot(q - a, ab) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(q, a + t * ab);
}

double polyline_distance(Point2 q, const std::vector<Point2>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) best = std::min(best, point_segment_distance(q, pts[i], pts[i + 1]));
  return best;
}

}  // namespace

double GammaReference::distance_to(Point2 q) const {
  switch (kind_) {
    case Kind::circle:
      return std::abs(distance(q, center_) - radius_);
    case Kind::graphs: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& arc : arcs_) {
        const double lo = std::min(arc.x_from, arc.x_to);
        const double hi = std::max(arc.x_from, arc.x_to);
        if (q.x >= lo && q.x <= hi) best = std::min(best, std::abs(q.y - arc.y_of_x.eval({q.x, 0.0})));
      }
      return std::min(best, polyline_distance(q, polyline(8192)));
    }
    default:
      return polyline_distance(q, polyline());
  }
}

GammaReference GammaReference::mirrored_x() const {
  GammaReference g = *this;
  g.center_.x = -center_.x;
  for (auto& arc : g.arcs_) {
    arc.y_of_x = arc.y_of_x.substitute(Var::x, -Expr::x());
    arc.x_from = -arc.x_from;
    arc.x_to = -arc.x_to;
  }
  for (auto& p : g.points_) p.x = -p.x;
  return g;
}

double Scenario::param(const std::string& key, double fallback) const {
  for (const auto& [k, v] : params) {
    if (k == key) return v;
  }
  return fallback;
}

// ---------------------------------------------------------------------------
// Builtins

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double take_param(const std::vector<std::pair<std::string, double>>& params, const std::string& key,
                  double fallback) {
  for (const auto& [k, v] : params) {
    if (k == key) return v;
  }
  return fallback;
}

void reject_unknown(const std::vector<std::pair<std::string, double>>& params,
                    const std::vector<std::string>& allowed, const std::string& name) {
  for (const auto& [k, v] : params) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw PreconditionError("builtin '" + name + "' has no parameter '" + k + "'");
    }
  }
}

Scenario type_a_circle(double b) {
  if (!(std::abs(b) < 0.5)) throw PreconditionError("type_a_circle requires |b| < 0.5");
  const std::string H = "(y - y^2/2 - x^2/2)";
  Scenario s;
  s.name = "type_a_circle";
  s.params = {{"b", b}};
  s.system = FilippovSystem(VectorField2::parse("1 - y + " + num(b) + "*" + H + "*x",
                                                "x + " + num(b) + "*" + H + "*(y - 1)"),
                            VectorField2::parse("0", "1"), ScalarField::parse("y"));
  auto& pc = s.polycycle;
  pc.type = PolycycleType::a;
  pc.p = {0.0, 0.0};
  pc.k = 1;
  pc.gamma = GammaReference::circle({0.0, 1.0}, 1.0);
  pc.return_section = Section::vertical(0.0, {0.0, 0.5}, Direction::increasing);
  pc.theta = 0.2;
  pc.rho = 0.3;
  s.window = {-1.5, 1.5, -0.5, 2.5};
  s.notes = "Unit circle centred at (0,1) is invariant: dH/dt = -b H (x^2 + (y-1)^2).";
  return s;
}

Scenario type_b_cubic() {
  Scenario s;
  s.name = "type_b_cubic";
  s.system = FilippovSystem(VectorField2::parse("1", "2*x - 3*x^2"), VectorField2::parse("-1", "1 - 2*x"),
                            ScalarField::parse("y"));
  auto& pc = s.polycycle;
  pc.type = PolycycleType::b;
  pc.p = {0.0, 0.0};
  pc.k = 1;
  pc.crossings = {{1.0, 0.0}};
  pc.gamma = GammaReference::graphs({{parse_expr("x^2 - x^3"), 0.0, 1.0}, {parse_expr("x^2 - x"), 1.0, 0.0}});
  pc.return_section = Section::horizontal(0.0, {0.0, 0.2}, Direction::increasing);
  pc.theta = 0.2;
  pc.rho = 0.1;
  pc.delta = 0.1;
  s.window = {-0.5, 1.5, -0.5, 0.5};
  s.notes = "Upper arc y = x^2 - x^3 of X+, lower arc y = x^2 - x of X-, crossing at (1,0).";
  return s;
}

Scenario fold_k2_variant(double b) {
  if (!(std::abs(b) < 0.5)) throw PreconditionError("fold_k2_variant requires |b| < 0.5");
  const std::string H = "(y - y^2/2 - x^4/4)";
  Scenario s;
  s.name = "fold_k2_variant";
  s.params = {{"b", b}};
  s.system = FilippovSystem(VectorField2::parse("1 - y + " + num(b) + "*" + H + "*x^3",
                                                "x^3 + " + num(b) + "*" + H + "*(y - 1)"),
                            VectorField2::parse("0", "1"), ScalarField::parse("y"));
  auto& pc = s.polycycle;
  pc.type = PolycycleType::a;
  pc.p = {0.0, 0.0};
  pc.k = 2;
  pc.gamma = GammaReference::flow();
  pc.return_section = Section::vertical(0.0, {0.0, 0.5}, Direction::increasing);
  pc.theta = 0.5;
  pc.rho = 0.6;
  s.window = {-1.5, 1.5, -0.5, 2.5};
  s.transition = hermite_transition(3);
  s.notes =
      "Closed curve y - y^2/2 = x^4/4 is invariant (dH/dt = -b H (x^6 + (y-1)^2)); contact of order 4 at the "
      "origin. Theorem A needs n >= 2k-1 = 3.";
  return s;
}

Scenario synthetic_crossing(double v) {
  if (!std::isfinite(v) || std::abs(v) > 10.0) throw PreconditionError("synthetic_crossing requires |v| <= 10");
  Scenario s;
  s.name = "synthetic_crossing";
  s.params = {{"v", v}};
  s.system = FilippovSystem(VectorField2::parse("1", num(v)), VectorField2::parse("1", "0"), ScalarField::parse("x"));
  auto& pc = s.polycycle;
  pc.type = PolycycleType::arc;
  pc.p = {0.0, 0.0};
  pc.k = 1;
  pc.crossings = {{0.0, 0.0}};
  pc.gamma = GammaReference::samples({});
  pc.return_section = Section::vertical(0.5, {-1.0, 1.0}, Direction::increasing);
  pc.theta = 0.5;
  pc.rho = 0.5;
  s.window = {-1.0, 1.0, -2.0, 2.0};
  s.prepared_at_crossings = true;
  s.notes = "Exterior arc from {x = -0.5} to {x = 0.5} through one crossing in prepared coordinates.";
  return s;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"type_a_circle", "type_b_cubic", "fold_k2_variant", "synthetic_crossing"};
}

Scenario builtin(const std::string& name, const std::vector<std::pair<std::string, double>>& params) {
  if (name == "type_a_circle") {
    reject_unknown(params, {"b"}, name);
    return type_a_circle(take_param(params, "b", 0.1));
  }
  if (name == "type_b_cubic") {
    reject_unknown(params, {}, name);
    return type_b_cubic();
  }
  if (name == "fold_k2_variant") {
    reject_unknown(params, {"b"}, name);
    return fold_k2_variant(take_param(params, "b", 0.1));
  }
  if (name == "synthetic_crossing") {
    reject_unknown(params, {"v"}, name);
    return synthetic_crossing(take_param(params, "v", 1.0));
  }
  throw PreconditionError("unknown builtin scenario '" + name + "'");
}

// ---------------------------------------------------------------------------
// Validation

namespace {

std::string fmt_point(Point2 p) {
  std::ostringstream os;
  os.precision(10);
  os << '(' << p.x << ", " << p.y << ')';
  return os.str();
}

std::string label(const Scenario& s, const char* a_label, const char* b_label) {
  return s.polycycle.type == PolycycleType::b ? b_label : a_label;
}

}  // namespace

Trajectory trace_polycycle(const Scenario& scn, const IntegratorOptions& opts, const SigmaTolerances& tol) {
  const auto& pc = scn.polycycle;
  IntegratorOptions o = opts;
  if (o.sample_spacing <= 0.0) o.sample_spacing = 1e-3;
  FilippovStop stop;
  if (pc.type == PolycycleType::a) {
    stop.section = Section::vertical(pc.p.x, {pc.p.y - 0.05, pc.p.y + 0.05}, Direction::increasing);
  } else if (pc.type == PolycycleType::b) {
    stop.max_sigma_arrivals = scn.m() + 1;
  } else {
    throw PreconditionError("open arcs cannot be traced as a closed polycycle");
  }
  return filippov_trajectory(scn.system, pc.p, o.max_time, o, stop, tol);
}

ValidationReport validate_scenario(const Scenario& scn, const IntegratorOptions& opts, const SigmaTolerances& tol) {
  ValidationReport rep;
  const auto& Z = scn.system;
  const auto& pc = scn.polycycle;
  auto fail = [&](std::string lbl, std::string msg) { rep.failures.push_back({std::move(lbl), std::move(msg)}); };
  auto pass = [&](std::string lbl) { rep.passed.push_back(std::move(lbl)); };

  // 0 must be a regular value of h at the points the theory uses.
  {
    std::vector<Point2> pts = pc.crossings;
    if (pc.type != PolycycleType::arc) pts.push_back(pc.p);
    bool ok = true;
    for (const auto& q : pts) {
      if (norm(Z.h().gradient(q)) <= tol.lie) {
        fail("(regular value)", "grad h vanishes at " + fmt_point(q));
        ok = false;
      }
    }
    if (ok) pass("(regular value)");
  }

  if (pc.type != PolycycleType::arc) {
    try {
      const Contact c = contact_multiplicity(Z, Side::plus, pc.p, tol);
      if (c.multiplicity != 2 * pc.k || !c.visible) {
        fail("(contact)", "contact_multiplicity mismatch at p=" + fmt_point(pc.p) + ": expected " +
                              std::to_string(2 * pc.k) + " visible for X+, got " + std::to_string(c.multiplicity) +
                              (c.visible ? " visible" : " invisible"));
      } else {
        pass("(contact)");
      }
    } catch (const Error& e) {
      fail("(contact)", std::string("contact_multiplicity mismatch: ") + e.what());
    }

    const std::string l1 = label(scn, "(a.1) X1+(p)>0", "(b.1) X1+(p)>0");
    if (Z.xplus()(pc.p).x > 0.0) pass(l1); else fail(l1, "X1+(p) = " + std::to_string(Z.xplus()(pc.p).x));

    const std::string l3 = label(scn, "(a.3) X-h(p)>0", "(b.3) X-h(p)>0");
    const double xmh = Z.xminus_h(pc.p);
    if (xmh > tol.lie) {
      pass(l3);
    } else {
      fail(l3, "X-h(p) = " + std::to_string(xmh) +
                   "; apply the -Z reduction (reverse_time) to study the time-reversed system");
    }
  }

  const std::string l2 = label(scn, "(a.2) crossings", "(b.2) crossings");
  bool crossings_ok = true;
  for (std::size_t i = 0; i < pc.crossings.size(); ++i) {
    const Point2 q = pc.crossings[i];
    const std::string qname = "q" + std::to_string(i + 1) + "=" + fmt_point(q);
    try {
      const SigmaClassification c = classify_sigma_point(Z, q, tol);
      if (c.kind != SigmaKind::crossing) {
        fail(l2, qname + " is not a crossing point (" + to_string(c.kind) + ")");
        crossings_ok = false;
      }
    } catch (const Error& e) {
      fail(l2, qname + ": " + e.what());
      crossings_ok = false;
    }
  }

  if (pc.type == PolycycleType::arc) {
    if (crossings_ok) pass(l2);
    if (scn.prepared_at_crossings) {
      bool ok = true;
      for (const auto& q : pc.crossings) {
        const Vec2 g = Z.h().gradient(q);
        const Vec2 xp = Z.xplus()(q);
        const Vec2 xm = Z.xminus()(q);
        if (g.x != 1.0 || g.y != 0.0 || std::abs(xp.x - 1.0) > 1e-12 || std::abs(xm.x - 1.0) > 1e-12) {
          fail("(prepared)", "field is not in prepared coordinates at " + fmt_point(q));
          ok = false;
        }
      }
      if (ok) pass("(prepared)");
    }
    return rep;
  }

  if (!rep.ok()) return rep;  // closure needs the local hypotheses

  try {
    const Trajectory tr = trace_polycycle(scn, opts, tol);
    rep.closure_residual = distance(tr.end_point(), pc.p);
    if (rep.closure_residual > 1e-7) {
      std::ostringstream os;
      os << "integrated Gamma does not close: residual " << rep.closure_residual;
      fail("(closure)", os.str());
    } else {
      pass("(closure)");
    }
    std::vector<Point2> hits;
    for (const auto& ev : tr.events) {
      if (ev.kind == EventKind::sigma_cross && distance(ev.p, pc.p) > 1e-6) hits.push_back(ev.p);
    }
    if (hits.size() != pc.crossings.size()) {
      fail(l2, "trajectory through p crosses Sigma " + std::to_string(hits.size()) + " times, declared m=" +
                   std::to_string(pc.crossings.size()));
    } else {
      bool ok = crossings_ok;
      for (std::size_t i = 0; i < hits.size(); ++i) {
        if (distance(hits[i], pc.crossings[i]) > 1e-6) {
          fail(l2, "crossing " + std::to_string(i + 1) + " found at " + fmt_point(hits[i]) + ", declared " +
                       fmt_point(pc.crossings[i]));
          ok = false;
        }
      }
      if (ok) pass(l2);
    }
    if (pc.gamma.resolved()) {
      double worst = pc.gamma.distance_to(pc.p);
      for (const auto& q : pc.crossings) worst = std::max(worst, pc.gamma.distance_to(q));
      const double tol_gamma = pc.gamma.kind() == GammaReference::Kind::samples ? 1e-6 : 1e-8;
      if (worst > tol_gamma) {
        fail("(gamma)", "reference curve misses p or a crossing by " + std::to_string(worst));
      } else {
        pass("(gamma)");
      }
    }
  } catch (const Error& e) {
    fail("(closure)", e.what());
  }

  if (pc.type == PolycycleType::b && pc.gamma.resolved()) {
    // W^u_t(p) along X+ forward and W^s(p) along X- backward must lie on Γ.
    try {
      IntegratorOptions o = opts;
      double worst = 0.0;
      std::vector<Sample> s1;
      std::vector<Sample> s2;
      integrate(Flow::of(Z.xplus(), Regime::plus), pc.p, 0.0, 0.2, o, {}, &s1);
      integrate(Flow::of(Z.xminus(), Regime::minus).reversed(), pc.p, 0.0, 0.2, o, {}, &s2);
      for (const auto& s : s1) worst = std::max(worst, pc.gamma.distance_to(s.p));
      for (const auto& s : s2) worst = std::max(worst, pc.gamma.distance_to(s.p));
      if (worst > 1e-6) {
        fail("(b.3) separatrices on Gamma", "separatrix leaves Gamma by " + std::to_string(worst));
      } else {
        pass("(b.3) separatrices on Gamma");
      }
    } catch (const Error& e) {
      fail("(b.3) separatrices on Gamma", e.what());
    }
  }
  return rep;
}

void require_valid(Scenario& scn, const IntegratorOptions& opts, const SigmaTolerances& tol) {
  ValidationReport rep = validate_scenario(scn, opts, tol);
  if (!rep.ok()) throw ValidationError(rep.failures);
  if (!scn.polycycle.gamma.resolved()) {
    const Trajectory tr = trace_polycycle(scn, opts, tol);
    std::vector<Point2> pts = tr.points();
    pts.back() = pts.front();
    scn.polycycle.gamma = GammaReference::samples(std::move(pts));
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json point_json(Point2 p) { return json::array({p.x, p.y}); }

Point2 json_point(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) throw PreconditionError(what + " must be a two-element array");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

const char* direction_name(Direction d) { return to_string(d); }

Direction parse_direction(const std::string& s) {
  if (s == "increasing") return Direction::increasing;
  if (s == "decreasing") return Direction::decreasing;
  if (s == "either") return Direction::either;
  throw PreconditionError("unknown crossing direction '" + s + "'");
}

json section_json(const Section& s) {
  json j;
  j["kind"] = s.kind == Section::Kind::vertical ? "vertical" : "horizontal";
  j["c"] = s.c;
  j["range"] = json::array({s.range.lo, s.range.hi});
  j["direction"] = direction_name(s.direction);
  return j;
}

Section json_section(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const Point2 r = json_point(j.at("range"), "section range");
  const Direction d = parse_direction(j.value("direction", std::string("either")));
  if (kind == "vertical") return Section::vertical(j.at("c").get<double>(), {r.x, r.y}, d);
  if (kind == "horizontal") return Section::horizontal(j.at("c").get<double>(), {r.x, r.y}, d);
  throw PreconditionError("unknown section kind '" + kind + "'");
}

Expr field_expr(const json& j, const std::string& key, const std::string& where) {
  const std::string src = j.at(key).get<std::string>();
  try {
    return parse_expr(src);
  } catch (const ParseError& e) {
    throw ParseError(where + "." + key + ": " + e.what(), e.offset());
  }
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario JSON: ") + e.what(), e.byte);
  }
  try {
    Scenario s;
    s.name = j.value("name", std::string("custom"));
    if (j.contains("params")) {
      for (const auto& [k, v] : j.at("params").items()) s.params.emplace_back(k, v.get<double>());
    }
    const auto& xp = j.at("xplus");
    const auto& xm = j.at("xminus");
    s.system = FilippovSystem(VectorField2(field_expr(xp, "f1", "xplus"), field_expr(xp, "f2", "xplus")),
                              VectorField2(field_expr(xm, "f1", "xminus"), field_expr(xm, "f2", "xminus")),
                              ScalarField(field_expr(j, "h", "scenario")));
    if (j.contains("window")) {
      const auto& w = j.at("window");
      s.window = {w.at("xmin").get<double>(), w.at("xmax").get<double>(), w.at("ymin").get<double>(),
                  w.at("ymax").get<double>()};
    }
    const auto& pj = j.at("polycycle");
    auto& pc = s.polycycle;
    const std::string type = pj.at("type").get<std::string>();
    if (type == "a") pc.type = PolycycleType::a;
    else if (type == "b") pc.type = PolycycleType::b;
    else if (type == "arc") pc.type = PolycycleType::arc;
    else throw PreconditionError("polycycle.type must be a, b or arc");
    pc.p = json_point(pj.at("p"), "polycycle.p");
    pc.k = pj.value("k", 1);
    if (pc.k < 1) throw PreconditionError("polycycle.k must be >= 1");
    if (pj.contains("crossings")) {
      for (const auto& q : pj.at("crossings")) pc.crossings.push_back(json_point(q, "polycycle.crossings[]"));
    }
    const json gj = pj.value("gamma", json{{"kind", "flow"}});
    const std::string gk = gj.at("kind").get<std::string>();
    if (gk == "circle") {
      pc.gamma = GammaReference::circle(json_point(gj.at("center"), "gamma.center"), gj.at("radius").get<double>());
    } else if (gk == "graphs") {
      std::vector<GraphArc> arcs;
      for (const auto& a : gj.at("arcs")) {
        arcs.push_back({field_expr(a, "y", "gamma.arcs[]"), a.at("x_from").get<double>(), a.at("x_to").get<double>()});
      }
      pc.gamma = GammaReference::graphs(std::move(arcs));
    } else if (gk == "samples") {
      std::vector<Point2> pts;
      for (const auto& q : gj.at("points")) pts.push_back(json_point(q, "gamma.points[]"));
      pc.gamma = GammaReference::samples(std::move(pts));
    } else if (gk == "flow") {
      pc.gamma = GammaReference::flow();
    } else {
      throw PreconditionError("gamma.kind must be circle, graphs, samples or flow");
    }
    pc.return_section = json_section(pj.at("return_section"));
    pc.theta = pj.value("theta", pc.theta);
    pc.rho = pj.value("rho", pc.rho);
    pc.delta = pj.value("delta", pc.delta);
    pc.eta = pj.value("eta", pc.eta);
    pc.c_beta = pj.value("c_beta", pc.c_beta);
    s.prepared_at_crossings = j.value("prepared_at_crossings", false);
    if (j.contains("transition")) {
      const auto& t = j.at("transition");
      const std::string fam = t.at("family").get<std::string>();
      const int n = t.value("n", 1);
      if (fam == "hermite") s.transition = hermite_transition(n);
      else if (fam == "bump") s.transition = bump_transition(n, t.value("c", 0.0));
      else throw PreconditionError("transition.family must be hermite or bump");
    }
    s.notes = j.value("notes", std::string());
    return s;
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("scenario JSON: ") + e.what());
  }
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  json params = json::object();
  for (const auto& [k, v] : s.params) params[k] = v;
  j["params"] = params;
  j["xplus"] = {{"f1", s.system.xplus().f1().to_string()}, {"f2", s.system.xplus().f2().to_string()}};
  j["xminus"] = {{"f1", s.system.xminus().f1().to_string()}, {"f2", s.system.xminus().f2().to_string()}};
  j["h"] = s.system.h().expr().to_string();
  j["window"] = {{"xmin", s.window.xmin}, {"xmax", s.window.xmax}, {"ymin", s.window.ymin}, {"ymax", s.window.ymax}};
  const auto& pc = s.polycycle;
  json pj;
  pj["type"] = to_string(pc.type);
  pj["p"] = point_json(pc.p);
  pj["k"] = pc.k;
  json cr = json::array();
  for (const auto& q : pc.crossings) cr.push_back(point_json(q));
  pj["crossings"] = cr;
  json gj;
  switch (pc.gamma.kind()) {
    case GammaReference::Kind::circle:
      gj["kind"] = "circle";
      gj["center"] = point_json(pc.gamma.center());
      gj["radius"] = pc.gamma.radius();
      break;
    case GammaReference::Kind::graphs: {
      gj["kind"] = "graphs";
      json arcs = json::array();
      for (const auto& a : pc.gamma.arcs()) arcs.push_back({{"y", a.y_of_x.to_string()}, {"x_from", a.x_from}, {"x_to", a.x_to}});
      gj["arcs"] = arcs;
      break;
    }
    case GammaReference::Kind::samples: {
      gj["kind"] = "samples";
      json pts = json::array();
      for (const auto& q : pc.gamma.points()) pts.push_back(point_json(q));
      gj["points"] = pts;
      break;
    }
    case GammaReference::Kind::flow:
      gj["kind"] = "flow";
      break;
  }
  pj["gamma"] = gj;
  pj["return_section"] = section_json(pc.return_section);
  pj["theta"] = pc.theta;
  pj["rho"] = pc.rho;
  pj["delta"] = pc.delta;
  pj["eta"] = pc.eta;
  pj["c_beta"] = pc.c_beta;
  j["polycycle"] = pj;
  j["prepared_at_crossings"] = s.prepared_at_crossings;
  if (s.transition) {
    json t;
    t["family"] = to_string(s.transition->family());
    t["n"] = s.transition->smoothness_class();
    if (s.transition->family() == TransitionFamily::bump) t["c"] = s.transition->c();
    j["transition"] = t;
  }
  j["notes"] = s.notes;
  return j.dump(2) + "\n";
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario s = scenario_from_json(buf.str());
  require_valid(s);
  return s;
}

// ---------------------------------------------------------------------------
// −Z reduction

Scenario reverse_time(const Scenario& scn) {
  const Expr mx = -Expr::x();
  auto mirror_field = [&](const VectorField2& X) {
    // Y(x, y) = R·(−X)(R(x, y)) with R(x, y) = (−x, y).
    return VectorField2(X.f1().substitute(Var::x, mx), -X.f2().substitute(Var::x, mx));
  };
  Scenario s = scn;
  s.name = scn.name + "_reversed";
  s.system = FilippovSystem(mirror_field(scn.system.xplus()), mirror_field(scn.system.xminus()),
                            ScalarField(scn.system.h().expr().substitute(Var::x, mx)));
  auto& pc = s.polycycle;
  pc.p.x = -pc.p.x;
  for (auto& q : pc.crossings) q.x = -q.x;
  std::reverse(pc.crossings.begin(), pc.crossings.end());
  pc.gamma = scn.polycycle.gamma.mirrored_x();
  Section& rs = pc.return_section;
  if (rs.kind == Section::Kind::vertical) {
    rs.c = -rs.c;
  } else {
    rs.range = {-rs.range.hi, -rs.range.lo};
  }
  s.window = {-scn.window.xmax, -scn.window.xmin, scn.window.ymin, scn.window.ymax};
  s.notes = "time reversal of " + scn.name + " composed with x -> -x. " + scn.notes;
  return s;
}

const char* to_string(PolycycleType t) {
  switch (t) {
    case PolycycleType::a: return "a";
    case PolycycleType::b: return "b";
    case PolycycleType::arc: return "arc";
  }
  return "?";
}

}  // namespace pwsreg
