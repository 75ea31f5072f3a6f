#ifndef UAVRIS_TRAJECTORY_S2_HPP
#define UAVRIS_TRAJECTORY_S2_HPP

#include <Eigen/Core>
#include <vector>

#include "uavris/convex.hpp"
#include "uavris/rates.hpp"

namespace uavris {

/// Small-move linearization of the AoA cosine: (x - x_w) / d_ref with the
/// distance frozen at the previous iterate. Equals the exact cosine when
/// d_ref is the current distance.
double approx_aoa(const Vec2& q, const Vec2& w, double d_ref);

/// First-order model of |sum_m e^{j t_m}|^2 around t_ref, exact at t_ref.
struct PhaseSumTangent {
  std::vector<double> t_ref;
  std::vector<double> grad;   // d|.|^2 / d t_m at t_ref
  double value_ref = 0.0;

  double at(std::span<const double> t) const {
    double v = value_ref;
    for (size_t m = 0; m < grad.size(); ++m) v += grad[m] * (t[m] - t_ref[m]);
    return v;
  }
};
PhaseSumTangent linearize_phase_sum(std::span<const double> t_ref);

/// Concave model of the per-slot secrecy margin in the joint variables:
/// the two log terms are kept, the convex remainders are tangent-linearized
/// at the reference. Exact at the reference; decreasing in the eavesdropper
/// phase-sum surrogate.
struct JointSecrecySurrogate {
  double z_ref = 0.0;
  double v_ref = 0.0;
  double ge_ref = 0.0;
  double coupling = 0.0;  // p h0^2 / sigma^2
  double c_v = 0.0;       // v_ref + coupling * ge_ref

  double at(double z, double v, double ge, double gb) const;
};
JointSecrecySurrogate make_joint_surrogate(double z_ref, double v_ref, double ge_ref,
                                           double coupling);

struct JointRunResult {
  Trajectory trajectory;
  PhaseSchedule phases;
  int sca_iterations = 0;
  bool solver_failure = false;
};

/// Scheme II block: one convex program per iteration over the trajectory,
/// every element phase, and the slack stack, with a per-slot trust region
/// that keeps the AoA linearization honest. Steps are kept only when the
/// exactly evaluated minimum secrecy rate does not decrease.
JointRunResult optimize_trajectory_s2(const Eigen::MatrixXd& assoc_binary,
                                      const Eigen::MatrixXd& power, const Trajectory& Q_init,
                                      const PhaseSchedule& theta_init, const ScenarioConfig& cfg);

}  // namespace uavris

#endif  // UAVRIS_TRAJECTORY_S2_HPP
