#ifndef UAVRIS_POWER_HPP
#define UAVRIS_POWER_HPP

#include <Eigen/Core>
#include <vector>

#include "uavris/convex.hpp"
#include "uavris/rates.hpp"

namespace uavris {

/// Affine over-estimator of the eavesdropper rate around p_ref:
/// c_hat(p) = log2(1 + p_ref g / s2) + g (p - p_ref) / (ln2 (s2 + p_ref g)).
/// Tight at p_ref and a global upper bound on the concave c(p).
struct LinearizedEveRate {
  double intercept = 0.0;
  double slope = 0.0;
  double at(double p) const { return intercept + slope * p; }
};
LinearizedEveRate linearize_eve_rate(double p_ref, double gain_eve, double noise);

/// Fractional-programming multiplier: zeta / (total power + P0).
double dinkelbach_eta(double zeta, const Allocation& alloc, double circuit_power);

/// Fixed per-slot channel numbers for the power block.
struct SlotGains {
  std::vector<int> served;          // user per slot 1..N, -1 when silent
  Eigen::VectorXd gain_bs;          // squared cascaded gain toward the BS
  Eigen::VectorXd gain_eve;         // squared exact gain toward the eavesdropper
};
SlotGains slot_gains(const ScenarioConfig& cfg, const Trajectory& traj,
                     const PhaseSchedule& phases, const Eigen::MatrixXd& assoc_binary);

struct PowerSubproblemResult {
  Eigen::MatrixXd power;   // K x N
  double zeta = 0.0;       // surrogate objective component
  double objective = 0.0;  // zeta - eta (sum p + P0)
  SolveReport report;
};

/// One convexified parametric step: maximizes zeta - eta (sum p + P0) where
/// each served slot contributes its rate minus the tangent over-estimate of
/// the eavesdropper rate taken at P_ref. Slots whose margin is negative at
/// P_ref keep zero power for this step (a clamped slot contributes nothing).
PowerSubproblemResult solve_power_subproblem(double eta, const Eigen::MatrixXd& assoc_binary,
                                             const SlotGains& gains, const ScenarioConfig& cfg,
                                             const Eigen::MatrixXd& P_ref);

struct PowerRunResult {
  Eigen::MatrixXd power;
  double zeta = 0.0;          // surrogate value at the last accepted iterate
  double eta = 0.0;
  double final_F = 0.0;       // parametric objective at termination
  int dinkelbach_iterations = 0;
  int sca_iterations = 0;
  bool solver_failure = false;
};

/// Nested loops: the outer pass refreshes the fractional multiplier from the
/// incumbent, the inner pass re-linearizes the eavesdropper rate until the
/// surrogate stabilizes. The returned powers are feasible and never lower
/// the exactly evaluated efficiency of the incoming state.
PowerRunResult optimize_power(const Eigen::MatrixXd& assoc_binary, const Trajectory& traj,
                              const PhaseSchedule& phases, const Eigen::MatrixXd& P_init,
                              const ScenarioConfig& cfg);

}  // namespace uavris

#endif  // UAVRIS_POWER_HPP
