#ifndef UAVRIS_RATES_HPP
#define UAVRIS_RATES_HPP

#include <Eigen/Core>
#include <utility>

#include "uavris/channel.hpp"
#include "uavris/scenario.hpp"
#include "uavris/types.hpp"

namespace uavris {

/// Full iterate of the alternating optimization.
struct SolutionState {
  Allocation allocation;
  Trajectory trajectory;
  PhaseSchedule phases;
  double zeta = 0.0;   // minimum per-user average secrecy rate, bits/s/Hz
  double gamma = 0.0;  // zeta / (total transmit power + circuit power), (bits/s/Hz)/W
};

/// log2(1 + p * gain / noise); monotone in p.
double rate_bs(double p, double gain_power, double noise);

/// Same formula with the eavesdropper's squared gain.
double rate_eve(double p, double gain_power_eve, double noise);

/// a * max(r - c, 0).
double secrecy_rate(double assoc_frac, double r, double c);

/// min over users of the per-user slot average (rows of R are users).
double min_avg_secrecy(const Eigen::MatrixXd& R);

/// zeta / (sum of all transmit powers + P0).
double secrecy_ee(double zeta, const Allocation& alloc, double circuit_power);

/// Per-slot rate decomposition recomputed from scratch. The *_exact columns
/// use the evaluated eavesdropper phase sum; the *_bound columns use the
/// coherent cap, which makes the eavesdropper stronger and secrecy no larger.
struct RateReport {
  Eigen::MatrixXd rate;        // K x N legitimate rate of the served pair (0 elsewhere)
  Eigen::MatrixXd eve_exact;   // K x N
  Eigen::MatrixXd eve_bound;   // K x N
  Eigen::MatrixXd secrecy_exact;  // K x N, association-weighted and clamped
  Eigen::MatrixXd secrecy_bound;  // K x N
  double zeta_exact = 0.0;
  double zeta_bound = 0.0;
  double gamma_exact = 0.0;
  double gamma_bound = 0.0;
};

/// Recomputes zeta and the efficiency objective from the raw state using the
/// exact eavesdropper gain. This is the reported objective everywhere.
/// Throws InfeasibleError when a state constraint is violated beyond tolerance.
RateReport evaluate_detailed(const ScenarioConfig& cfg, const Trajectory& traj,
                             const PhaseSchedule& phases, const Allocation& alloc);

/// (zeta, gamma) from evaluate_detailed.
std::pair<double, double> evaluate(const ScenarioConfig& cfg, const SolutionState& state);

/// Candidate secrecy-rate matrix for association: entry (k, n) is the clamped
/// margin user k would see in slot n under the current geometry and phases.
/// Idle pairs (zero power) are priced at the user's power cap so slots can be
/// reassigned; the exact eavesdropper gain is used throughout.
Eigen::MatrixXd association_rate_matrix(const ScenarioConfig& cfg, const Trajectory& traj,
                                        const PhaseSchedule& phases, const Allocation& alloc);

}  // namespace uavris

#endif  // UAVRIS_RATES_HPP
