#include "pwsreg/cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace pwsreg::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

void apply_tolerance(Resolved& r, const std::string& key, double v) {
  auto both = [&](double IntegratorOptions::*field) {
    r.opts.*field = v;
    r.map_opts.*field = v;
  };
  if (key == "rel_tol") both(&IntegratorOptions::rel_tol);
  else if (key == "abs_tol") both(&IntegratorOptions::abs_tol);
  else if (key == "max_step") both(&IntegratorOptions::max_step);
  else if (key == "event_tol") both(&IntegratorOptions::event_tol);
  else if (key == "band_step_cap") both(&IntegratorOptions::band_step_cap);
  else if (key == "max_time") both(&IntegratorOptions::max_time);
  else if (key == "sample_spacing") r.opts.sample_spacing = v;
  else if (key == "on_sigma") r.sigma.on_sigma = v;
  else if (key == "lie") r.sigma.lie = v;
  else throw PreconditionError("unknown tolerance key '" + key + "'");
}

bool looks_like_file(const std::string& s) {
  return s.ends_with(".json") || s.find('/') != std::string::npos || fs::is_regular_file(s);
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot write " + path.string());
  return f;
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  auto f = open_output(dir, name);
  f << text;
}

std::string csv_cell(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g;
  if (n == 1) return {lo};
  for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1));
  return g;
}

// Point of Σ on the line through `at` along the other coordinate.
std::optional<Point2> sigma_point(const ScalarField& h, Point2 at, bool along_y) {
  Point2 p = at;
  for (int it = 0; it < 60; ++it) {
    const double v = h(p);
    if (std::abs(v) <= 1e-14) return p;
    const Vec2 g = h.gradient(p);
    const double d = along_y ? g.y : g.x;
    if (d == 0.0 || !std::isfinite(d)) return std::nullopt;
    (along_y ? p.y : p.x) -= v / d;
  }
  return std::abs(h(p)) <= 1e-12 ? std::optional<Point2>(p) : std::nullopt;
}

void write_cycles(const std::string& dir, const SweepReport& rep) {
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (!rep.rows[i].cycle) continue;
    auto f = open_output(dir, "cycle_" + std::to_string(i) + ".csv");
    write_trajectory_csv(f, *rep.rows[i].cycle);
  }
}

void write_gamma(const std::string& dir, const Scenario& scn) {
  if (!scn.polycycle.gamma.resolved()) return;
  auto f = open_output(dir, "gamma.csv");
  const auto pts = scn.polycycle.gamma.polyline(2048);
  write_points_csv(f, pts);
}

}  // namespace

std::pair<std::string, double> parse_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw PreconditionError("expected key=value, got '" + text + "'");
  const std::string key = text.substr(0, eq);
  const std::string val = text.substr(eq + 1);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(val, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != val.size()) throw PreconditionError("not a number in '" + text + "'");
  return {key, v};
}

Resolved resolve(const RunConfig& cfg) {
  IntegratorOptions opts;
  IntegratorOptions mopts = map_options();
  Resolved r{Scenario{}, hermite_transition(1), {}, 0.0, opts, mopts, SigmaTolerances{}};
  for (const auto& [k, v] : cfg.tol) apply_tolerance(r, k, v);
  r.opts.validate();
  r.map_opts.validate();

  if (looks_like_file(cfg.scenario)) {
    if (!cfg.params.empty()) throw PreconditionError("--param applies to builtin scenarios only");
    r.scenario = load_scenario(cfg.scenario);
  } else {
    r.scenario = builtin(cfg.scenario, cfg.params);
    require_valid(r.scenario, IntegratorOptions{}, r.sigma);
  }

  if (cfg.phi) r.phi = parse_transition(*cfg.phi);
  else if (r.scenario.transition) r.phi = *r.scenario.transition;

  const int k = r.scenario.polycycle.k;
  r.eps = cfg.eps.empty() ? default_eps_list(k) : cfg.eps;
  for (double e : r.eps) {
    if (!(e > 0.0) || !std::isfinite(e)) throw PreconditionError("--eps values must be positive");
  }
  r.lambda = cfg.lambda ? *cfg.lambda : default_lambda(k, r.phi.smoothness_class());
  return r;
}

int cmd_classify(const RunConfig& cfg, const ClassifyArgs& args, std::ostream& out) {
  const Resolved r = resolve(cfg);
  const Scenario& scn = r.scenario;
  const ScalarField& h = scn.system.h();
  const Rect& w = scn.window;
  const Vec2 g = h.gradient(scn.polycycle.p);
  // Σ is tabulated over x when it is a graph over x, else over y.
  const bool over_x = std::abs(g.y) >= std::abs(g.x);
  const double lo = args.from.value_or(over_x ? w.xmin : w.ymin);
  const double hi = args.to.value_or(over_x ? w.xmax : w.ymax);
  const double step = args.step.value_or((hi - lo) / 20.0);
  if (!(step > 0.0) || !(hi >= lo)) throw PreconditionError("empty classification grid");
  const auto count = static_cast<long>(std::floor((hi - lo) / step * (1.0 + 1e-12))) + 1;
  if (count > 1'000'000) throw PreconditionError("classification grid too large");

  std::ostringstream csv;
  csv.precision(17);
  csv << (over_x ? "x" : "y") << ",kind,lie1+,lie1-,multiplicity,visible\n";
  for (long i = 0; i < count; ++i) {
    const double s = lo + static_cast<double>(i) * step;
    const Point2 guess = over_x ? Point2{s, scn.polycycle.p.y} : Point2{scn.polycycle.p.x, s};
    const auto p = sigma_point(h, guess, over_x);
    if (!p) throw DomainError("switching curve not found on the grid line", guess);
    const auto c = classify_sigma_point(scn.system, *p, r.sigma);
    csv << s << ',' << to_string(c.kind) << ',' << c.lie_plus << ',' << c.lie_minus << ',';
    if (c.kind == SigmaKind::tangency) {
      csv << c.contact.multiplicity << ',';
      if (c.contact.multiplicity % 2 == 0) csv << (c.contact.visible ? "true" : "false");
    } else {
      csv << "1,";
    }
    csv << '\n';
  }
  if (cfg.out_dir.empty()) out << csv.str();
  else write_file(cfg.out_dir, "classify.csv", csv.str());
  return ok;
}

int cmd_simulate(const RunConfig& cfg, const SimulateArgs& args, std::ostream& out) {
  const Resolved r = resolve(cfg);
  const Scenario& scn = r.scenario;
  if (!scn.window.contains(args.p0)) throw PreconditionError("p0 lies outside the scenario window");
  if (!(args.t_max >= 0.0) || !std::isfinite(args.t_max)) throw PreconditionError("--tmax must be nonnegative");
  IntegratorOptions opts = r.opts;
  opts.window = scn.window;
  opts.max_time = std::max(opts.max_time, args.t_max);
  if (opts.sample_spacing <= 0.0) opts.sample_spacing = 1e-2;

  Trajectory traj;
  if (args.regularized) {
    const Flow flow = Flow::of(regularized_field(scn.system, r.phi, r.eps.front()));
    Segment seg{Regime::regularized, {}};
    integrate(flow, args.p0, 0.0, args.t_max, opts, {}, &seg.samples);
    if (seg.samples.empty()) seg.samples.push_back({0.0, args.p0});
    traj.segments.push_back(std::move(seg));
  } else {
    traj = filippov_trajectory(scn.system, args.p0, args.t_max, opts, {}, r.sigma);
  }

  if (cfg.out_dir.empty()) {
    write_trajectory_csv(out, traj);
  } else {
    auto f = open_output(cfg.out_dir, "trajectory.csv");
    write_trajectory_csv(f, traj);
    write_file(cfg.out_dir, "events.json", events_json(traj));
  }
  return ok;
}

int cmd_return_map(const RunConfig& cfg, const MapArgs& args, std::ostream& out) {
  const Resolved r = resolve(cfg);
  const Scenario& scn = r.scenario;
  if (args.n < 1) throw PreconditionError("--n must be positive");
  std::optional<MapEvaluator> map;
  Interval dom{0.005, 0.05};
  if (args.regularized) {
    map = return_map_eps(scn, r.phi, r.eps.front(), r.lambda, r.map_opts);
    dom = return_window_eps(scn, r.phi, r.eps.front(), r.lambda);
  } else {
    map = return_map(scn, r.map_opts);
    if (scn.polycycle.type == PolycycleType::b) dom.hi = scn.polycycle.theta;
  }
  dom.lo = args.from.value_or(dom.lo);
  dom.hi = args.to.value_or(dom.hi);
  if (!(dom.hi >= dom.lo)) throw PreconditionError("empty map grid");
  const auto us = grid(dom.lo, dom.hi, args.n);
  if (cfg.out_dir.empty()) {
    write_map_csv(out, *map, us);
  } else {
    auto f = open_output(cfg.out_dir, "return_map.csv");
    write_map_csv(f, *map, us);
  }
  return ok;
}

int cmd_transition_map(const RunConfig& cfg, const TransitionArgs& args, std::ostream& out) {
  const Resolved r = resolve(cfg);
  const Scenario& scn = r.scenario;
  if (args.n < 2) throw PreconditionError("--n must be at least 2");
  if (args.which != "upper" && args.which != "lower") throw PreconditionError("--which must be upper or lower");
  const auto& pc = scn.polycycle;

  json doc;
  doc["map"] = args.which == "upper" ? "U_eps" : "L_eps";
  doc["lambda"] = r.lambda;
  json rows = json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "eps,input,output\n";
  for (double eps : r.eps) {
    const MapEvaluator map = args.which == "upper"
                                 ? upper_transition_map(scn, r.phi, eps, pc.rho, pc.theta, r.lambda, r.map_opts)
                                 : lower_transition_map(scn, r.phi, eps, pc.rho, pc.theta, r.lambda, r.map_opts);
    const Interval dom = map.from().range;
    const auto us = grid(dom.lo, dom.hi, args.n);
    const auto vs = map.evaluate_all(us);
    for (std::size_t i = 0; i < us.size(); ++i) csv << eps << ',' << us[i] << ',' << vs[i] << '\n';
    const auto [mn, mx] = std::minmax_element(vs.begin(), vs.end());
    const double spread = *mx - *mn;
    rows.push_back({{"eps", eps}, {"domain", {dom.lo, dom.hi}}, {"spread", spread},
                    {"spread_over_eps3", spread / (eps * eps * eps)}});
  }
  doc["rows"] = rows;
  if (cfg.out_dir.empty()) {
    out << csv.str();
  } else {
    write_file(cfg.out_dir, "transition_map.csv", csv.str());
    write_file(cfg.out_dir, "transition_map.json", doc.dump(2) + "\n");
  }
  return ok;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const Resolved r = resolve(cfg);
  const SweepReport rep = epsilon_sweep(r.scenario, r.phi, r.eps, r.lambda);
  const std::string text = to_json(rep);
  out << text;
  if (!cfg.out_dir.empty()) {
    write_file(cfg.out_dir, "sweep.json", text);
    write_cycles(cfg.out_dir, rep);
    write_gamma(cfg.out_dir, r.scenario);
  }
  return ok;
}

int cmd_verify(const RunConfig& cfg, const std::string& theorem, std::ostream& out) {
  const Resolved r = resolve(cfg);
  Verdict v;
  if (theorem == "A") v = theorem_a_verdict(r.scenario, r.phi, r.lambda, r.eps);
  else if (theorem == "B") v = theorem_b_verdict(r.scenario, r.phi, r.eps);
  else if (theorem == "prop1") v = prop1_verdict(r.scenario, r.phi, r.eps, r.lambda);
  else throw PreconditionError("unknown theorem '" + theorem + "' (expected A, B or prop1)");
  const std::string text = to_json(v);
  out << text;
  if (!cfg.out_dir.empty()) {
    write_file(cfg.out_dir, "verdict.json", text);
    write_cycles(cfg.out_dir, v.sweep);
    write_gamma(cfg.out_dir, r.scenario);
  }
  return v.agree && !v.inconclusive ? ok : disagree;
}

int report_error(std::ostream& err) {
  try {
    throw;
  } catch (const ValidationError& e) {
    err << "error: scenario validation failed\n";
    for (const auto& d : e.diagnostics()) err << "  " << d.label << ": " << d.message << '\n';
    return invalid;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return invalid;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return invalid;
  } catch (const ContactError& e) {
    err << "error: " << e.what() << '\n';
    return invalid;
  } catch (const IntegrationError& e) {
    err << "numerical failure: " << e.what() << ", t = " << csv_cell(e.when()) << '\n';
    return numerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return numerical;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regularized polycycles of planar Filippov systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pwsreg 0.1.0");

  RunConfig cfg;
  std::vector<std::string> params;
  std::vector<std::string> tols;
  std::string eps_text;
  std::string phi_text;
  double lambda = 0.0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", cfg.scenario, "builtin name or scenario JSON file")->capture_default_str();
    sub->add_option("--param", params, "builtin parameter key=value (repeatable)");
    sub->add_option("--phi", phi_text, "transition: hermite:n or bump:n:c");
    sub->add_option("--eps", eps_text, "comma-separated epsilon list");
    sub->add_option("--lambda", lambda, "section exponent");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--tol", tols, "tolerance override key=value (repeatable)");
  };

  ClassifyArgs classify;
  auto* c_classify = app.add_subcommand("classify", "tabulate the classification of the switching curve");
  common(c_classify);
  c_classify->add_option("--from", classify.from);
  c_classify->add_option("--to", classify.to);
  c_classify->add_option("--step", classify.step);

  SimulateArgs simulate;
  std::vector<double> p0;
  auto* c_simulate = app.add_subcommand("simulate", "integrate one trajectory");
  common(c_simulate);
  c_simulate->add_option("--p0", p0, "initial point x,y")->required()->delimiter(',')->expected(2);
  c_simulate->add_option("--tmax", simulate.t_max, "final time")->capture_default_str();
  c_simulate->add_flag("--regularized", simulate.regularized, "use Z_eps at the first --eps value");

  MapArgs map;
  auto* c_return = app.add_subcommand("return-map", "tabulate a first-return map");
  common(c_return);
  c_return->add_option("--from", map.from);
  c_return->add_option("--to", map.to);
  c_return->add_option("--n", map.n)->capture_default_str();
  c_return->add_flag("--regularized", map.regularized, "tabulate pi_eps at the first --eps value");

  TransitionArgs transition;
  auto* c_transition = app.add_subcommand("transition-map", "tabulate U_eps or L_eps for each eps");
  common(c_transition);
  c_transition->add_option("--which", transition.which)->check(CLI::IsMember({"upper", "lower"}));
  c_transition->add_option("--n", transition.n)->capture_default_str();

  auto* c_sweep = app.add_subcommand("sweep", "limit cycles over an epsilon ladder");
  common(c_sweep);

  std::string theorem;
  auto* c_verify = app.add_subcommand("verify", "compare a theorem prediction with the numerics");
  common(c_verify);
  c_verify->add_option("theorem", theorem, "A, B or prop1")->required()->check(CLI::IsMember({"A", "B", "prop1"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : invalid;
  }

  try {
    for (const auto& p : params) cfg.params.push_back(parse_assignment(p));
    for (const auto& t : tols) cfg.tol.push_back(parse_assignment(t));
    if (!phi_text.empty()) cfg.phi = phi_text;
    if (app.get_subcommands().front()->count("--lambda") > 0) cfg.lambda = lambda;
    if (!eps_text.empty()) {
      std::stringstream ss(eps_text);
      std::string item;
      while (std::getline(ss, item, ',')) cfg.eps.push_back(parse_assignment("eps=" + item).second);
    }

    const CLI::App* sub = app.get_subcommands().front();
    if (sub == c_classify) return cmd_classify(cfg, classify, out);
    if (sub == c_simulate) {
      simulate.p0 = {p0[0], p0[1]};
      return cmd_simulate(cfg, simulate, out);
    }
    if (sub == c_return) return cmd_return_map(cfg, map, out);
    if (sub == c_transition) return cmd_transition_map(cfg, transition, out);
    if (sub == c_sweep) return cmd_sweep(cfg, out);
    return cmd_verify(cfg, theorem, out);
  } catch (...) {
    return report_error(err);
  }
}

}  // namespace pwsreg::cli
