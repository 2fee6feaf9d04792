#include "pwsreg/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "pwsreg/errors.hpp"

namespace pwsreg {

void IntegratorOptions::validate() const {
  if (!(rel_tol > 0.0 && abs_tol > 0.0 && max_step > 0.0 && event_tol > 0.0 && band_step_cap > 0.0 &&
        max_time > 0.0)) {
    throw PreconditionError("integrator options must all be positive");
  }
}

Section Section::vertical(double c, Interval range, Direction d) {
  if (!(range.hi > range.lo)) throw PreconditionError("section range must have positive length");
  return {Kind::vertical, c, range, d};
}

Section Section::horizontal(double c, Interval range, Direction d) {
  if (!(range.hi > range.lo)) throw PreconditionError("section range must have positive length");
  return {Kind::horizontal, c, range, d};
}

std::string Section::describe() const {
  std::ostringstream os;
  os.precision(10);
  os << (kind == Kind::vertical ? "{x = " : "{y = ") << c << ", " << (kind == Kind::vertical ? "y" : "x")
     << " in [" << range.lo << ", " << range.hi << "], " << to_string(direction) << '}';
  return os.str();
}

Point2 Trajectory::end_point() const {
  if (segments.empty() || segments.back().samples.empty()) throw PreconditionError("empty trajectory");
  return segments.back().samples.back().p;
}

double Trajectory::end_time() const {
  if (segments.empty() || segments.back().samples.empty()) throw PreconditionError("empty trajectory");
  return segments.back().samples.back().t;
}

std::vector<Point2> Trajectory::points() const {
  std::vector<Point2> out;
  for (const auto& seg : segments) {
    for (std::size_t i = 0; i < seg.samples.size(); ++i) {
      if (i == 0 && !out.empty()) continue;
      out.push_back(seg.samples[i].p);
    }
  }
  return out;
}

std::size_t Trajectory::sample_count() const {
  std::size_t n = 0;
  for (const auto& seg : segments) n += seg.samples.size();
  return n;
}

// ---------------------------------------------------------------------------
// Flow

Flow::Flow(Rhs rhs, Regime regime) : rhs_(std::move(rhs)), regime_(regime) {}

Flow Flow::of(const VectorField2& X, Regime regime) {
  return {[X](Point2 p) { return X(p); }, regime};
}

Flow Flow::of(const RegularizedField& Z) {
  Flow f([Z](Point2 p) { return Z(p); }, Regime::regularized);
  f.band_h_ = Z.base().h();
  f.band_eps_ = Z.eps();
  return f;
}

Flow Flow::sliding(const FilippovSystem& Z) {
  return {[Z](Point2 p) { return sliding_vector_unchecked(Z, p); }, Regime::sliding};
}

Flow Flow::reversed() const {
  Flow f = *this;
  f.reversed_ = !reversed_;
  return f;
}

double Flow::step_cap(Point2 p, Vec2 v, const IntegratorOptions& opts) const {
  if (!band_h_) return std::numeric_limits<double>::infinity();
  const double hv = (*band_h_)(p);
  const double inside = opts.band_step_cap * band_eps_;
  if (std::abs(hv) <= band_eps_) return inside;
  const double rate = dot(band_h_->gradient(p), v);
  if (hv * rate >= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(inside, (std::abs(hv) - band_eps_) / std::abs(rate));
}

EventSpec EventSpec::for_section(const Section& s, int tag) {
  EventSpec e;
  e.g = [s](Point2 p) { return s.offset(p); };
  const Vec2 n = s.normal();
  e.grad = [n](Point2) { return n; };
  e.direction = s.direction;
  e.accept = [s](Point2 p) { return s.range.contains(s.coordinate(p)); };
  e.snap = [s](Point2 p) { return s.snap(p); };
  e.tag = tag;
  return e;
}

// ---------------------------------------------------------------------------
// Dormand–Prince 5(4)

namespace {

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                 b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct Step {
  Point2 y1;
  Vec2 k1, k3, k4, k5, k6, k7;
  Vec2 err;
};

Step rk_step(const Flow& f, Point2 y, Vec2 k1, double h) {
  Step s;
  s.k1 = k1;
  const Vec2 k2 = f(y + h * (a21 * k1));
  s.k3 = f(y + h * (a31 * k1 + a32 * k2));
  s.k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * s.k3));
  s.k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * s.k3 + a54 * s.k4));
  s.k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * s.k3 + a64 * s.k4 + a65 * s.k5));
  s.y1 = y + h * (b1 * k1 + b3 * s.k3 + b4 * s.k4 + b5 * s.k5 + b6 * s.k6);
  s.k7 = f(s.y1);
  s.err = h * (e1 * k1 + e3 * s.k3 + e4 * s.k4 + e5 * s.k5 + e6 * s.k6 + e7 * s.k7);
  return s;
}

struct Dense {
  double t0 = 0.0;
  double h = 0.0;
  Point2 r1, r2, r3, r4, r5;

  Dense(double t0_, double h_, Point2 y0, const Step& s) : t0(t0_), h(h_) {
    const Vec2 ydiff = s.y1 - y0;
    const Vec2 bspl = h * s.k1 - ydiff;
    r1 = y0;
    r2 = ydiff;
    r3 = bspl;
    r4 = ydiff - h * s.k7 - bspl;
    r5 = h * (d1 * s.k1 + d3 * s.k3 + d4 * s.k4 + d5 * s.k5 + d6 * s.k6 + d7 * s.k7);
  }

  [[nodiscard]] Point2 at(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
  }
};

double error_norm(const Step& s, Point2 y0, const IntegratorOptions& o) {
  const double sx = o.abs_tol + o.rel_tol * std::max(std::abs(y0.x), std::abs(s.y1.x));
  const double sy = o.abs_tol + o.rel_tol * std::max(std::abs(y0.y), std::abs(s.y1.y));
  const double ex = s.err.x / sx;
  const double ey = s.err.y / sy;
  return std::sqrt(0.5 * (ex * ex + ey * ey));
}

double initial_step(const Flow& f, Point2 y0, Vec2 f0, const IntegratorOptions& o) {
  const double sx = o.abs_tol + o.rel_tol * std::abs(y0.x);
  const double sy = o.abs_tol + o.rel_tol * std::abs(y0.y);
  auto nrm = [&](Vec2 v) { return std::sqrt(0.5 * ((v.x / sx) * (v.x / sx) + (v.y / sy) * (v.y / sy))); };
  const double dn0 = nrm(y0);
  const double dn1 = nrm(f0);
  double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
  h0 = std::min(h0, o.max_step);
  const Vec2 f1 = f(y0 + h0 * f0);
  const double dn2 = nrm(f1 - f0) / h0;
  const double m = std::max(dn1, dn2);
  const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
  // Near the origin h0 collapses with |y0|; the floor only costs a rejection.
  return std::max(std::min(100.0 * h0, h1), 1e-9);
}

bool crosses(double ga, double gb, Direction d) {
  const bool up = ga < 0.0 && gb >= 0.0;
  const bool down = ga > 0.0 && gb <= 0.0;
  switch (d) {
    case Direction::increasing: return up;
    case Direction::decreasing: return down;
    case Direction::either: return up || down;
  }
  return false;
}

// Illinois iteration on the dense interpolant; returns the bracketed root.
double locate_dense(const EventSpec& ev, const Dense& d, double ta, double ga, double tb, double gb) {
  for (int it = 0; it < 200; ++it) {
    if (std::abs(tb - ta) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(tb))) break;
    double tc = tb - gb * (tb - ta) / (gb - ga);
    if (!(tc > std::min(ta, tb) && tc < std::max(ta, tb))) tc = 0.5 * (ta + tb);
    const double gc = ev.g(d.at(tc));
    if (gc == 0.0) return tc;
    if ((gc < 0.0) != (gb < 0.0)) {
      ta = tb;
      ga = gb;
    } else {
      ga *= 0.5;
    }
    tb = tc;
    gb = gc;
  }
  return tb;
}

struct Located {
  double t;
  Point2 p;
};

// Polishes the event time with exact Runge–Kutta sub-steps from the step start.
Located polish(const Flow& f, const EventSpec& ev, double tn, Point2 yn, Vec2 kn, double t_lo, double t_hi,
               double tau, const IntegratorOptions& o) {
  auto exact = [&](double t) { return t == tn ? yn : rk_step(f, yn, kn, t - tn).y1; };
  Point2 y = exact(tau);
  for (int it = 0; it < 12; ++it) {
    const double gv = ev.g(y);
    if (std::abs(gv) <= 1e-3 * o.event_tol) break;
    const double slope = dot(ev.grad(y), f(y));
    if (slope == 0.0 || !std::isfinite(slope)) break;
    double next = tau - gv / slope;
    next = std::clamp(next, t_lo, t_hi);
    if (next == tau) break;
    tau = next;
    y = exact(tau);
  }
  if (ev.snap) {
    y = ev.snap(y);
  } else {
    const double gv = ev.g(y);
    if (std::abs(gv) > 1e-3 * o.event_tol) {
      const Vec2 gr = ev.grad(y);
      const double n2 = dot(gr, gr);
      if (n2 > 0.0) y = y - (gv / n2) * gr;
    }
  }
  return {tau, y};
}

void push_dense(std::vector<Sample>* samples, const Dense& d, double t_from, double t_to, Point2 p_from,
                Point2 p_to, double spacing) {
  if (samples == nullptr) return;
  if (spacing > 0.0) {
    const double len = distance(p_from, p_to);
    const auto pieces = static_cast<int>(std::ceil(len / spacing));
    for (int i = 1; i < pieces; ++i) {
      const double t = t_from + (t_to - t_from) * i / pieces;
      samples->push_back({t, d.at(t)});
    }
  }
  samples->push_back({t_to, p_to});
}

}  // namespace

IntegrationResult integrate(const Flow& flow, Point2 p0, double t0, double t_end, const IntegratorOptions& opts,
                            std::span<const EventSpec> events, std::vector<Sample>* samples) {
  opts.validate();
  IntegrationResult res;
  double t = t0;
  Point2 y = p0;
  if (samples != nullptr) samples->push_back({t, y});
  if (!(t_end > t0)) {
    res.t = t;
    res.p = y;
    return res;
  }
  Vec2 k1 = flow(y);
  std::vector<double> gprev(events.size());
  std::vector<bool> near_start(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    gprev[i] = events[i].g(y);
    near_start[i] = std::abs(gprev[i]) <= opts.event_tol;
  }
  std::vector<double> gnext(events.size());

  double h = std::min(initial_step(flow, y, k1, opts), opts.max_step);
  bool last_rejected = false;
  bool first = true;
  std::size_t steps = 0;

  while (t < t_end) {
    if (++steps > opts.max_steps) {
      throw IntegrationError(IntegrationError::Reason::step_budget, "integration step budget exhausted", y, t);
    }
    h = std::min({h, opts.max_step, flow.step_cap(y, k1, opts)});
    bool final_step = false;
    if (t + h >= t_end) {
      h = t_end - t;
      final_step = true;
    }
    const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < h_min) {
      std::ostringstream os;
      os << "step size underflow at t=" << t << " p=" << y << " (stiff region?)";
      throw IntegrationError(IntegrationError::Reason::step_underflow, os.str(), y, t);
    }

    const Step s = rk_step(flow, y, k1, h);
    const double err = error_norm(s, y, opts);
    if (!(err <= 1.0)) {
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h *= std::min(1.0, fac);
      last_rejected = true;
      continue;
    }

    const double t1 = final_step ? t_end : t + h;
    const Dense dense(t, h, y, s);

    std::optional<EventHit> best;
    for (std::size_t i = 0; i < events.size(); ++i) {
      const EventSpec& ev = events[i];
      gnext[i] = ev.g(s.y1);
      if (first && near_start[i]) continue;
      if (!crosses(gprev[i], gnext[i], ev.direction)) continue;
      const double tau = locate_dense(ev, dense, t, gprev[i], t1, gnext[i]);
      const Located loc = polish(flow, ev, t, y, k1, t, t1, tau, opts);
      if (ev.accept && !ev.accept(loc.p)) continue;
      if (!best || loc.t < best->t - 1e-13 * std::max(1.0, std::abs(loc.t))) best = EventHit{ev.tag, loc.t, loc.p};
    }
    if (best) {
      push_dense(samples, dense, t, best->t, y, best->p, opts.sample_spacing);
      res.t = best->t;
      res.p = best->p;
      res.event = best;
      res.steps = steps;
      return res;
    }
    if (opts.window && !opts.window->contains(s.y1)) {
      std::ostringstream os;
      os << "orbit left the working window at p=" << s.y1;
      throw IntegrationError(IntegrationError::Reason::left_window, os.str(), s.y1, t1);
    }
    push_dense(samples, dense, t, t1, y, s.y1, opts.sample_spacing);
    t = t1;
    y = s.y1;
    k1 = s.k7;
    gprev.swap(gnext);
    first = false;

    double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (last_rejected) fac = std::min(fac, 1.0);
    h *= fac;
    last_rejected = false;
  }
  res.t = t;
  res.p = y;
  res.steps = steps;
  return res;
}

SectionHit flow_to_section(const Flow& flow, Point2 p0, const Section& target, const IntegratorOptions& opts,
                           bool record, std::span<const Section> guards) {
  std::vector<EventSpec> evs;
  evs.push_back(EventSpec::for_section(target, 0));
  for (std::size_t i = 0; i < guards.size(); ++i) evs.push_back(EventSpec::for_section(guards[i], static_cast<int>(i) + 1));

  SectionHit hit;
  Segment seg{flow.regime(), {}};
  const IntegrationResult r = integrate(flow, p0, 0.0, opts.max_time, opts, evs, record ? &seg.samples : nullptr);
  if (!r.event) {
    std::ostringstream os;
    os << "section " << target.describe() << " not reached from " << p0 << " within t=" << opts.max_time;
    throw IntegrationError(IntegrationError::Reason::max_time, os.str(), r.p, r.t);
  }
  if (r.event->tag != 0) {
    std::ostringstream os;
    os << "orbit from " << p0 << " exits through guard section "
       << guards[static_cast<std::size_t>(r.event->tag - 1)].describe() << " at " << r.p;
    throw IntegrationError(IntegrationError::Reason::misconfigured_section, os.str(), r.p, r.t);
  }
  hit.p = r.p;
  hit.t = r.t;
  if (record) {
    hit.traj.segments.push_back(std::move(seg));
    hit.traj.events.push_back({r.t, r.p, EventKind::section_hit});
  }
  return hit;
}

SectionHit flow_to_section(const VectorField2& X, Point2 p0, const Section& target, const IntegratorOptions& opts) {
  return flow_to_section(Flow::of(X, Regime::regularized), p0, target, opts, true);
}

// ---------------------------------------------------------------------------
// Filippov trajectories

namespace {

enum Tag : int { kStop = 0, kSigma = 1, kPlusExit = 2, kMinusExit = 3 };

struct LieGradient {
  CompiledExpr dx;
  CompiledExpr dy;
  Vec2 operator()(Point2 p) const { return {dx(p), dy(p)}; }
};

LieGradient lie_gradient(const FilippovSystem& Z, Side s) {
  const Expr e = Z.lie(s).expr(1);
  return {CompiledExpr(e.diff(Var::x)), CompiledExpr(e.diff(Var::y))};
}

[[noreturn]] void ambiguous(const std::string& why, Point2 q) {
  std::ostringstream os;
  os << "ambiguous Filippov continuation at " << q << ": " << why;
  throw AmbiguityError(os.str(), q);
}

// Sign with which the orbit of X^± leaves Σ at q, from its first nonzero Lie derivative.
double departure_sign(const FilippovSystem& Z, Side s, Point2 q, const SigmaTolerances& tol) {
  for (int m = 1; m <= tol.max_order; ++m) {
    const double v = Z.lie(s)(m, q);
    if (std::abs(v) > tol.lie) return v > 0.0 ? 1.0 : -1.0;
  }
  throw ContactError("flat contact while resolving Filippov continuation");
}

Point2 project_to_sigma(const ScalarField& h, Point2 p) {
  for (int i = 0; i < 3; ++i) {
    const double v = h(p);
    if (v == 0.0) break;
    const Vec2 g = h.gradient(p);
    const double n2 = dot(g, g);
    if (n2 == 0.0) break;
    p = p - (v / n2) * g;
  }
  return p;
}

Regime initial_regime(const FilippovSystem& Z, Point2 p, const SigmaTolerances& tol, bool& from_tangency) {
  from_tangency = false;
  const double hv = Z.h()(p);
  if (std::abs(hv) > tol.on_sigma) return hv > 0.0 ? Regime::plus : Regime::minus;
  const double a = Z.xplus_h(p);
  const double b = Z.xminus_h(p);
  const bool ta = std::abs(a) <= tol.lie;
  const bool tb = std::abs(b) <= tol.lie;
  from_tangency = ta || tb;
  const double sa = ta ? departure_sign(Z, Side::plus, p, tol) : (a > 0.0 ? 1.0 : -1.0);
  const double sb = tb ? departure_sign(Z, Side::minus, p, tol) : (b > 0.0 ? 1.0 : -1.0);
  const bool up = sa > 0.0;     // X⁺ leaves into h > 0
  const bool down = sb < 0.0;   // X⁻ leaves into h < 0
  if (up && down) ambiguous("both fields leave the switching manifold", p);
  if (up) return Regime::plus;
  if (down) return Regime::minus;
  return Regime::sliding;
}

}  // namespace

Trajectory filippov_trajectory(const FilippovSystem& Z, Point2 p0, double t_max, const IntegratorOptions& opts,
                               const FilippovStop& stop, const SigmaTolerances& tol) {
  Trajectory traj;
  bool from_tangency = false;
  Regime regime = initial_regime(Z, p0, tol, from_tangency);
  if (from_tangency && regime != Regime::sliding) traj.events.push_back({0.0, p0, EventKind::tangency_exit});

  const Flow fplus = Flow::of(Z.xplus(), Regime::plus);
  const Flow fminus = Flow::of(Z.xminus(), Regime::minus);
  const Flow fslide = Flow::sliding(Z);
  std::optional<LieGradient> gplus;
  std::optional<LieGradient> gminus;

  const ScalarField& h = Z.h();
  EventSpec sigma_down{[&h](Point2 p) { return h(p); }, [&h](Point2 p) { return h.gradient(p); },
                       Direction::decreasing, {}, {}, kSigma};
  EventSpec sigma_up = sigma_down;
  sigma_up.direction = Direction::increasing;

  double t = 0.0;
  Point2 p = p0;
  int arrivals = 0;
  std::vector<EventSpec> evs;

  for (;;) {
    evs.clear();
    if (stop.section) evs.push_back(EventSpec::for_section(*stop.section, kStop));
    const Flow* flow = &fplus;
    switch (regime) {
      case Regime::plus:
        evs.push_back(sigma_down);
        break;
      case Regime::minus:
        flow = &fminus;
        evs.push_back(sigma_up);
        break;
      default: {
        flow = &fslide;
        if (!gplus) {
          gplus = lie_gradient(Z, Side::plus);
          gminus = lie_gradient(Z, Side::minus);
        }
        EventSpec ep{[&Z](Point2 q) { return Z.xplus_h(q); }, *gplus, Direction::increasing, {}, {}, kPlusExit};
        EventSpec em{[&Z](Point2 q) { return Z.xminus_h(q); }, *gminus, Direction::decreasing, {}, {}, kMinusExit};
        evs.push_back(std::move(ep));
        evs.push_back(std::move(em));
      }
    }

    Segment seg{regime, {}};
    const IntegrationResult r = integrate(*flow, p, t, t_max, opts, evs, &seg.samples);
    if (r.event && regime == Regime::sliding) seg.samples.back().p = project_to_sigma(h, seg.samples.back().p);
    traj.segments.push_back(std::move(seg));
    t = r.t;
    p = traj.segments.back().samples.back().p;

    if (!r.event) {
      if (stop.section) {
        std::ostringstream os;
        os << "stop section " << stop.section->describe() << " not reached within t=" << t_max;
        throw IntegrationError(IntegrationError::Reason::max_time, os.str(), p, t);
      }
      return traj;
    }

    switch (r.event->tag) {
      case kStop:
        traj.events.push_back({t, p, EventKind::section_hit});
        return traj;
      case kSigma: {
        ++arrivals;
        if (stop.max_sigma_arrivals >= 0 && arrivals >= stop.max_sigma_arrivals) {
          traj.events.push_back({t, p, EventKind::sigma_cross});
          return traj;
        }
        const double a = Z.xplus_h(p);
        const double b = Z.xminus_h(p);
        if (regime == Regime::plus) {
          if (std::abs(b) <= tol.lie) ambiguous("lower field tangent at arrival from above", p);
          if (std::abs(a) <= tol.lie) {
            if (departure_sign(Z, Side::plus, p, tol) > 0.0) {
              traj.events.push_back({t, p, EventKind::tangency_exit});
              continue;
            }
            ambiguous("upper field tangent at arrival", p);
          }
          if (b < 0.0) {
            regime = Regime::minus;
            traj.events.push_back({t, p, EventKind::sigma_cross});
          } else {
            regime = Regime::sliding;
            traj.events.push_back({t, p, EventKind::sliding_entry});
          }
        } else {
          if (std::abs(a) <= tol.lie) ambiguous("upper field tangent at arrival from below", p);
          if (std::abs(b) <= tol.lie) {
            if (departure_sign(Z, Side::minus, p, tol) < 0.0) {
              traj.events.push_back({t, p, EventKind::tangency_exit});
              continue;
            }
            ambiguous("lower field tangent at arrival", p);
          }
          if (a > 0.0) {
            regime = Regime::plus;
            traj.events.push_back({t, p, EventKind::sigma_cross});
          } else {
            regime = Regime::sliding;
            traj.events.push_back({t, p, EventKind::sliding_entry});
          }
        }
        break;
      }
      case kPlusExit: {
        if (std::abs(Z.xminus_h(p)) <= tol.lie) ambiguous("both fields tangent at the end of sliding", p);
        regime = Regime::plus;
        traj.events.push_back({t, p, EventKind::sliding_exit});
        break;
      }
      default: {
        if (std::abs(Z.xplus_h(p)) <= tol.lie) ambiguous("both fields tangent at the end of sliding", p);
        regime = Regime::minus;
        traj.events.push_back({t, p, EventKind::sliding_exit});
        break;
      }
    }
    if (!(t < t_max)) return traj;
  }
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::plus: return "X+";
    case Regime::minus: return "X-";
    case Regime::sliding: return "sliding";
    case Regime::regularized: return "regularized";
  }
  return "?";
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::section_hit: return "section-hit";
    case EventKind::sigma_cross: return "sigma-cross";
    case EventKind::sliding_entry: return "sliding-entry";
    case EventKind::sliding_exit: return "sliding-exit";
    case EventKind::tangency_exit: return "tangency-exit";
  }
  return "?";
}

const char* to_string(Direction d) {
  switch (d) {
    case Direction::increasing: return "increasing";
    case Direction::decreasing: return "decreasing";
    case Direction::either: return "either";
  }
  return "?";
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto old = os.precision(17);
  os << "t,x,y,regime\n";
  bool first_seg = true;
  for (const auto& seg : traj.segments) {
    for (std::size_t i = 0; i < seg.samples.size(); ++i) {
      if (i == 0 && !first_seg) continue;
      const Sample& s = seg.samples[i];
      os << s.t << ',' << s.p.x << ',' << s.p.y << ',' << to_string(seg.regime) << '\n';
    }
    first_seg = false;
  }
  os.precision(old);
}

}  // namespace pwsreg
