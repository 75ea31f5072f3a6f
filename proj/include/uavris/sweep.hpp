#ifndef UAVRIS_SWEEP_HPP
#define UAVRIS_SWEEP_HPP

#include <optional>
#include <string>
#include <vector>

#include "uavris/orchestrator.hpp"

namespace uavris {

enum class SweepAxis { altitude, pathloss, max_power, ris_elements, v_max };

SweepAxis parse_sweep_axis(const std::string& name);  // H | alpha | Pk | M | vmax
std::string sweep_axis_name(SweepAxis axis);

/// Copy of cfg with one parameter replaced (validated).
ScenarioConfig apply_axis(const ScenarioConfig& cfg, SweepAxis axis, double value);

struct SweepPoint {
  double value = 0.0;
  double zeta = 0.0;
  double gamma = 0.0;
  std::optional<double> gamma_baseline;
  bool failed = false;
  std::string error;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::altitude;
  std::vector<SweepPoint> points;
};

/// One independent optimization per value; points run concurrently up to the
/// jobs limit and per-point failures are recorded without stopping the sweep.
SweepResult run_sweep(const ScenarioConfig& cfg, SweepAxis axis,
                      const std::vector<double>& values, Scheme scheme, bool with_baseline,
                      int jobs);

std::string sweep_csv(const SweepResult& result);
std::string sweep_svg(const SweepResult& result);

}  // namespace uavris

#endif  // UAVRIS_SWEEP_HPP
