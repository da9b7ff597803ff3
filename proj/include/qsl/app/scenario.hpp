#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "qsl/app/config.hpp"
#include "qsl/bounds.hpp"
#include "qsl/dynamics.hpp"

namespace qsl::app {

struct ScenarioResult {
  ScenarioConfig config;
  QuenchTrajectory<double> trajectory;
  std::vector<BoundReport<double>> reports;  ///< in the order of config.bounds
  double wall_seconds = 0;

  bool passed() const;
};

/**
 * Runs one scenario end to end: scaling solution, evolved states on a grid
 * covering the whole trajectory, bound velocities from the initial state, and
 * the dominance checks. Throws NumericError when a state reaches the grid
 * boundary or a numerical contract fails; dominance violations are reported,
 * not thrown.
 */
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Header t,overlap,rate,v_bound,margin,bound; one row per time per bound.
void write_series_csv(const ScenarioResult& result, std::ostream& out);
void write_summary(const ScenarioResult& result, std::ostream& out);

/// Writes series.csv and summary.txt into dir, creating it if needed.
void write_outputs(const ScenarioResult& result, const std::filesystem::path& dir);

}  // namespace qsl::app
