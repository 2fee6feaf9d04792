#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pwsreg/fields.hpp"
#include "pwsreg/regularize.hpp"
#include "pwsreg/types.hpp"

namespace pwsreg {

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  double max_step = 0.1;
  double event_tol = 1e-12;
  double band_step_cap = 0.5;  // step ≤ band_step_cap·ε while |h| ≤ ε
  double max_time = 100.0;
  std::size_t max_steps = 5'000'000;
  double sample_spacing = 0.0;  // > 0 adds dense-output samples between steps
  std::optional<Rect> window;   // leaving it is an error

  void validate() const;
};

enum class Direction { increasing, decreasing, either };

/// Straight transversal section {x = c} or {y = c}.
struct Section {
  enum class Kind { vertical, horizontal };

  Kind kind = Kind::vertical;
  double c = 0.0;
  Interval range{-1.0, 1.0};  // admissible values of the free coordinate
  Direction direction = Direction::either;

  static Section vertical(double c, Interval range, Direction d = Direction::either);
  static Section horizontal(double c, Interval range, Direction d = Direction::either);

  [[nodiscard]] Point2 point(double u) const {
    return kind == Kind::vertical ? Point2{c, u} : Point2{u, c};
  }
  [[nodiscard]] double coordinate(Point2 p) const { return kind == Kind::vertical ? p.y : p.x; }
  [[nodiscard]] double offset(Point2 p) const { return kind == Kind::vertical ? p.x - c : p.y - c; }
  [[nodiscard]] Vec2 normal() const { return kind == Kind::vertical ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0}; }
  [[nodiscard]] Point2 snap(Point2 p) const {
    if (kind == Kind::vertical) p.x = c; else p.y = c;
    return p;
  }
  [[nodiscard]] std::string describe() const;
};

enum class Regime { plus, minus, sliding, regularized };
enum class EventKind { section_hit, sigma_cross, sliding_entry, sliding_exit, tangency_exit };

struct Sample {
  double t = 0.0;
  Point2 p;
};

struct Segment {
  Regime regime = Regime::plus;
  std::vector<Sample> samples;
};

struct TrajectoryEvent {
  double t = 0.0;
  Point2 p;
  EventKind kind = EventKind::section_hit;
};

struct Trajectory {
  std::vector<Segment> segments;
  std::vector<TrajectoryEvent> events;

  [[nodiscard]] bool empty() const { return segments.empty(); }
  [[nodiscard]] Point2 end_point() const;
  [[nodiscard]] double end_time() const;
  /// All samples in order, junction duplicates removed.
  [[nodiscard]] std::vector<Point2> points() const;
  [[nodiscard]] std::size_t sample_count() const;
};

/// Vector field seen by the integrator, with optional regularization band.
class Flow {
 public:
  using Rhs = std::function<Vec2(Point2)>;

  Flow(Rhs rhs, Regime regime);
  static Flow of(const VectorField2& X, Regime regime);
  static Flow of(const RegularizedField& Z);
  static Flow sliding(const FilippovSystem& Z);

  [[nodiscard]] Vec2 operator()(Point2 p) const { return reversed_ ? -rhs_(p) : rhs_(p); }
  [[nodiscard]] Flow reversed() const;
  [[nodiscard]] Regime regime() const { return regime_; }
  [[nodiscard]] bool is_reversed() const { return reversed_; }

  /// Largest admissible step from p given velocity v.
  [[nodiscard]] double step_cap(Point2 p, Vec2 v, const IntegratorOptions& opts) const;

 private:
  Rhs rhs_;
  Regime regime_;
  bool reversed_ = false;
  std::optional<ScalarField> band_h_;
  double band_eps_ = 0.0;
};

/// Scalar event function g(p) = 0 located along the integration.
struct EventSpec {
  std::function<double(Point2)> g;
  std::function<Vec2(Point2)> grad;
  Direction direction = Direction::either;
  std::function<bool(Point2)> accept;  // optional filter applied at the located point
  std::function<Point2(Point2)> snap;  // optional exact projection onto g = 0
  int tag = 0;

  static EventSpec for_section(const Section& s, int tag);
};

struct EventHit {
  int tag = 0;
  double t = 0.0;
  Point2 p;
};

struct IntegrationResult {
  double t = 0.0;
  Point2 p;
  std::optional<EventHit> event;
  std::size_t steps = 0;
};

/// Adaptive Dormand–Prince 5(4) integration from (t0, p0) up to t_end or
/// the first accepted event. Samples (if requested) include both ends.
IntegrationResult integrate(const Flow& flow, Point2 p0, double t0, double t_end, const IntegratorOptions& opts,
                            std::span<const EventSpec> events = {}, std::vector<Sample>* samples = nullptr);

struct SectionHit {
  Point2 p;
  double t = 0.0;
  Trajectory traj;
};

/// Flows until the first admissible hit of `target`; hits of any `guards`
/// section first raise IntegrationError(misconfigured_section).
SectionHit flow_to_section(const Flow& flow, Point2 p0, const Section& target, const IntegratorOptions& opts = {},
                           bool record = true, std::span<const Section> guards = {});
SectionHit flow_to_section(const VectorField2& X, Point2 p0, const Section& target,
                           const IntegratorOptions& opts = {});

/// Stop rules for Filippov trajectories.
struct FilippovStop {
  std::optional<Section> section;
  int max_sigma_arrivals = -1;  // stop on reaching Σ this many times; -1 disables
};

Trajectory filippov_trajectory(const FilippovSystem& Z, Point2 p0, double t_max, const IntegratorOptions& opts = {},
                               const FilippovStop& stop = {}, const SigmaTolerances& tol = {});

const char* to_string(Regime r);
const char* to_string(EventKind k);
const char* to_string(Direction d);

/// CSV with header t,x,y,regime.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace pwsreg
