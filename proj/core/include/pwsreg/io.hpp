#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "pwsreg/analysis.hpp"
#include "pwsreg/maps.hpp"
#include "pwsreg/scenarios.hpp"

namespace pwsreg {

// JSON documents with a fixed key order; non-finite numbers become null.
std::string to_json(const Verdict& v, bool include_rows = true);
std::string to_json(const SweepReport& rep);
std::string to_json(const ValidationReport& rep);
std::string to_json(const Estimate& e);
std::string to_json(const SEstimate& s);
std::string to_json(const LimitConstants& lc);
std::string to_json(const AsymptoticModel& m);
std::string events_json(const Trajectory& traj);

/// CSV with header input,output,derivative.
void write_map_csv(std::ostream& os, const MapEvaluator& map, std::span<const double> inputs);
/// CSV with header x,y.
void write_points_csv(std::ostream& os, std::span<const Point2> pts);

}  // namespace pwsreg
