#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <pwsreg/pwsreg.hpp>

namespace pwsreg::cli {

enum ExitCode : int { ok = 0, disagree = 1, invalid = 2, numerical = 3 };

/// Flags shared by every command, before resolution.
struct RunConfig {
  std::string scenario = "type_a_circle";  // builtin name or path to a JSON file
  std::vector<std::pair<std::string, double>> params;
  std::optional<std::string> phi;           // "hermite:n" or "bump:n:c"
  std::vector<double> eps;                  // empty: default ladder for k
  std::optional<double> lambda;
  std::string out_dir;                      // empty: main output goes to stdout
  std::vector<std::pair<std::string, double>> tol;
};

/// Everything a command needs, validated.
struct Resolved {
  Scenario scenario;
  TransitionFn phi;
  std::vector<double> eps;
  double lambda = 0.0;
  IntegratorOptions opts;      // integration tolerances after overrides
  IntegratorOptions map_opts;  // map-layer tolerances after overrides
  SigmaTolerances sigma;
};

/// "key=value" with a numeric value.
std::pair<std::string, double> parse_assignment(const std::string& text);

/// Builds and validates the scenario; throws ValidationError, PreconditionError
/// or ParseError on bad input.
Resolved resolve(const RunConfig& cfg);

struct ClassifyArgs {
  std::optional<double> from;
  std::optional<double> to;
  std::optional<double> step;
};

struct SimulateArgs {
  Point2 p0;
  double t_max = 1.0;
  bool regularized = false;  // integrate Z_ε at the first --eps value
};

struct MapArgs {
  std::optional<double> from;
  std::optional<double> to;
  int n = 16;
  bool regularized = false;  // π_ε instead of the Filippov return
};

struct TransitionArgs {
  std::string which = "upper";  // upper | lower
  int n = 9;
};

// Each command writes its main report to `out` (or into cfg.out_dir) and
// returns an exit code. Errors propagate; `run` maps them to codes.
int cmd_classify(const RunConfig& cfg, const ClassifyArgs& args, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, const SimulateArgs& args, std::ostream& out);
int cmd_return_map(const RunConfig& cfg, const MapArgs& args, std::ostream& out);
int cmd_transition_map(const RunConfig& cfg, const TransitionArgs& args, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, const std::string& theorem, std::ostream& out);

/// Exit code for an exception escaping a command; prints a diagnostic to `err`.
int report_error(std::ostream& err);

/// Full command line entry point.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pwsreg::cli
