#include "pwsreg/io.hpp"

#include <ostream>

#include <json.hpp>

#include "pwsreg/parallel.hpp"

namespace pwsreg {

using json = nlohmann::ordered_json;

namespace {

json fixed_point_json(const FixedPointResult& fp) {
  json j;
  j["location"] = fp.location;
  j["derivative"] = fp.derivative;
  j["stability"] = to_string(fp.stability);
  j["bracket"] = json::array({fp.bracket.lo, fp.bracket.hi});
  j["residual"] = fp.residual;
  return j;
}

json sweep_json(const SweepReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json row;
    row["eps"] = r.eps;
    json fps = json::array();
    for (const auto& fp : r.fixed_points) fps.push_back(fixed_point_json(fp));
    row["fixed_points"] = fps;
    row["hausdorff_to_gamma"] = r.hausdorff_to_gamma;
    row["K_eff"] = r.K_eff;
    row["closure"] = r.closure;
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  json j;
  j["rows"] = rows;
  j["fit"] = {{"convergence_exponent", rep.convergence_exponent}, {"r2", rep.r2}};
  return j;
}

json estimate_json(const Estimate& e) {
  json rungs = json::array();
  for (const auto& r : e.rungs) {
    rungs.push_back({{"u", r.u}, {"value", r.value}, {"error", r.error}, {"used", r.used}});
  }
  return {{"value", e.value}, {"error", e.error}, {"rungs", rungs}};
}

json sequence_json(const LimitSequence& s) {
  return {{"values", s.values}, {"predicted", s.predicted}, {"approaches", s.approaches}};
}

}  // namespace

std::string to_json(const Verdict& v, bool include_rows) {
  json j;
  j["theorem"] = v.theorem;
  json in;
  in["K"] = v.K;
  in["S"] = v.S;
  in["discriminant"] = v.discriminant;
  in["k"] = v.k;
  in["n"] = v.n;
  if (v.lambda) in["lambda"] = *v.lambda; else in["lambda"] = nullptr;
  j["inputs"] = in;
  j["prediction"] = v.prediction;
  j["observation"] = v.observation;
  j["agree"] = v.agree;
  j["inconclusive"] = v.inconclusive;
  if (include_rows) j["sweep"] = sweep_json(v.sweep);
  json metrics = json::object();
  for (const auto& [k, val] : v.metrics) metrics[k] = val;
  j["metrics"] = metrics;
  j["notes"] = v.notes;
  return j.dump(2) + "\n";
}

std::string to_json(const SweepReport& rep) { return sweep_json(rep).dump(2) + "\n"; }

std::string to_json(const ValidationReport& rep) {
  json fails = json::array();
  for (const auto& d : rep.failures) fails.push_back({{"label", d.label}, {"message", d.message}});
  json j;
  j["ok"] = rep.ok();
  j["failures"] = fails;
  j["passed"] = rep.passed;
  j["closure_residual"] = rep.closure_residual;
  return j.dump(2) + "\n";
}

std::string to_json(const Estimate& e) { return estimate_json(e).dump(2) + "\n"; }

std::string to_json(const SEstimate& s) {
  json j;
  j["value"] = s.value;
  j["finite_difference"] = s.finite_difference;
  if (s.closed_form) j["closed_form"] = *s.closed_form; else j["closed_form"] = nullptr;
  j["u_ref"] = s.u_ref;
  j["eps"] = s.eps;
  j["slopes"] = s.slopes;
  return j.dump(2) + "\n";
}

std::string to_json(const LimitConstants& lc) {
  json j;
  j["theta"] = lc.theta;
  j["second"] = lc.second;
  j["r"] = sequence_json(lc.r);
  j["kappa_u"] = sequence_json(lc.kappa_u);
  j["kappa_s"] = sequence_json(lc.kappa_s);
  return j.dump(2) + "\n";
}

std::string to_json(const AsymptoticModel& m) {
  json j;
  j["K"] = m.K;
  j["S"] = m.S;
  j["alpha"] = m.alpha;
  j["beta"] = m.beta;
  j["r_ext"] = m.r_ext;
  j["kappa_u"] = m.kappa_u;
  j["kappa_s"] = m.kappa_s;
  j["lambda_star"] = m.lambda_star;
  j["eta"] = m.eta;
  j["notes"] = m.notes;
  return j.dump(2) + "\n";
}

std::string events_json(const Trajectory& traj) {
  json evs = json::array();
  for (const auto& e : traj.events) {
    evs.push_back({{"t", e.t}, {"x", e.p.x}, {"y", e.p.y}, {"kind", to_string(e.kind)}});
  }
  json segs = json::array();
  for (const auto& s : traj.segments) {
    if (s.samples.empty()) continue;
    segs.push_back({{"regime", to_string(s.regime)},
                    {"t_start", s.samples.front().t},
                    {"t_end", s.samples.back().t},
                    {"samples", s.samples.size()}});
  }
  json j;
  j["events"] = evs;
  j["segments"] = segs;
  return j.dump(2) + "\n";
}

void write_map_csv(std::ostream& os, const MapEvaluator& map, std::span<const double> inputs) {
  const auto rows = parallel_indexed(inputs.size(), [&](std::size_t i) {
    return std::pair<double, double>{map(inputs[i]), map.derivative_at(inputs[i])};
  });
  const auto old = os.precision(17);
  os << "input,output,derivative\n";
  for (std::size_t i = 0; i < inputs.size(); ++i) os << inputs[i] << ',' << rows[i].first << ',' << rows[i].second << '\n';
  os.precision(old);
}

void write_points_csv(std::ostream& os, std::span<const Point2> pts) {
  const auto old = os.precision(17);
  os << "x,y\n";
  for (const auto& p : pts) os << p.x << ',' << p.y << '\n';
  os.precision(old);
}

}  // namespace pwsreg
