#ifndef UAVRIS_ORCHESTRATOR_HPP
#define UAVRIS_ORCHESTRATOR_HPP

#include <string>
#include <vector>

#include "uavris/rates.hpp"

namespace uavris {

enum class Scheme { one = 1, two = 2 };

struct IterationRecord {
  int iteration = 0;
  double gamma = 0.0;
  double zeta = 0.0;
  double zeta_bound = 0.0;    // secrecy under the coherent-cap eavesdropper
  int assoc_solver_iters = 0;
  int dinkelbach_iters = 0;
  int power_sca_iters = 0;
  int trajectory_sca_iters = 0;
  int solver_failures = 0;
  bool reverted = false;      // trajectory/phase step rolled back
  double wall_ms = 0.0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  bool converged = false;
  int iterations_to_converge = 0;

  std::string to_csv() const;  // one row per outer iteration
};

struct RunResult {
  SolutionState state;
  IterationTrace trace;
};

/// Alternating outer loop: user association, transmit power, then the
/// trajectory/phase block of the selected scheme, with a revert safeguard
/// that keeps the recorded efficiency trace non-decreasing. Subproblem
/// failures degrade to the incumbent block and never abort the run.
RunResult run_algorithm2(const ScenarioConfig& cfg, Scheme scheme);

/// Closed-form per-outer-iteration operation estimates for the three blocks,
/// next to the measured counts when a trace is supplied.
struct ComplexityEstimate {
  double association_ops = 0.0;   // K N
  double power_ops = 0.0;         // (K N)^3.5 log2(1/eps1)
  double trajectory_ops = 0.0;    // scheme I: (2 K N)^3.5 log2(1/eps2)
                                  // scheme II: ((6K + M) N)^3.5 log2(1/eps3)
  double total_per_outer = 0.0;
  int measured_outer_iterations = 0;
  int measured_power_iterations = 0;
  int measured_trajectory_iterations = 0;
};
ComplexityEstimate complexity_estimate(const ScenarioConfig& cfg, Scheme scheme,
                                       const IterationTrace* trace = nullptr);

}  // namespace uavris

#endif  // UAVRIS_ORCHESTRATOR_HPP
