#ifndef UAVRIS_BASELINE_AF_HPP
#define UAVRIS_BASELINE_AF_HPP

#include "uavris/orchestrator.hpp"

namespace uavris {

/// Half-duplex amplify-and-forward relay rate for one hop pair:
/// gamma1 = p h0 / (sigma^2 d_first^alpha), gamma2 = P_UAV h0 / (sigma^2 d_second^alpha),
/// rate = 0.5 log2(1 + gamma1 gamma2 / (gamma1 + gamma2 + 1)).
/// The eavesdropper rate uses the same form with her distance second.
double af_rate(double p_user, double d_first, double d_second, const ScenarioConfig& cfg);

/// Candidate clamped secrecy margins of the relay baseline, priced at the
/// power cap for idle pairs (same convention as the reflecting variant).
Eigen::MatrixXd af_association_rate_matrix(const ScenarioConfig& cfg, const Trajectory& traj,
                                           const Allocation& alloc);

/// Exact relay-baseline objective for a binary association and power matrix.
/// The relay power is charged only on slots that actually serve a user.
struct AfReport {
  Eigen::MatrixXd secrecy;  // K x N clamped margins
  double zeta = 0.0;
  double gamma = 0.0;
};
AfReport af_evaluate(const ScenarioConfig& cfg, const Trajectory& traj,
                     const Eigen::MatrixXd& assoc_binary, const Eigen::MatrixXd& power);

/// The "no reflecting surface" comparison: the same alternating structure
/// (association, power, trajectory, safeguard) with the relay rate model and
/// no phase block. The trajectory block is a feasibility-preserving local
/// search accepted only on exact improvement.
RunResult run_baseline(const ScenarioConfig& cfg);

}  // namespace uavris

#endif  // UAVRIS_BASELINE_AF_HPP
