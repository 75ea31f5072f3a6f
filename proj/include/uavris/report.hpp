#ifndef UAVRIS_REPORT_HPP
#define UAVRIS_REPORT_HPP

#include <string>
#include <vector>

#include "uavris/orchestrator.hpp"

namespace uavris {

/// Full solution with units, round-trippable through evaluate().
std::string solution_json(const ScenarioConfig& cfg, const SolutionState& state,
                          const IterationTrace& trace);

/// Map view: users, BS, eavesdropper, initial versus optimized path, and
/// silent slots marked. Deterministic output for identical inputs.
std::string trajectory_svg(const ScenarioConfig& cfg, const Trajectory& initial,
                           const SolutionState& state);

/// Objective versus outer iteration, one polyline per labeled series.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
std::string convergence_svg(const std::vector<Series>& series);

/// Generic line plot used by the sweep driver.
std::string line_plot_svg(const std::string& x_label, const std::string& y_label,
                          const std::vector<Series>& series);

}  // namespace uavris

#endif  // UAVRIS_REPORT_HPP
