#ifndef UAVRIS_TRAJECTORY_S1_HPP
#define UAVRIS_TRAJECTORY_S1_HPP

#include <Eigen/Core>
#include <vector>

#include "uavris/convex.hpp"
#include "uavris/rates.hpp"

namespace uavris {

/// Element phases that align every reflected path at the BS for the given
/// user: theta_m = 2 pi (m-1) (d/lambda) (phi_k - phi_b), wrapped to [0, 2pi).
/// The common offset is fixed to zero since only |gain| matters.
std::vector<double> aligned_phases(const Vec2& q, const Vec2& user, const Vec2& bs,
                                   const ScenarioConfig& cfg);

/// log2(1 + B / z) for the slack z standing in for (d_k d_b)^alpha.
double rate_in_slack(double z, double B);

/// Tangent minorant of rate_in_slack at z_ref:
/// r_hat(z) = r(z_ref) - B (z - z_ref) / (z_ref (z_ref + B) ln2).
struct RateSlackTangent {
  double intercept = 0.0;
  double slope = 0.0;
  double at(double z) const { return intercept + slope * z; }
};
RateSlackTangent linearize_rate_slack(double z_ref, double B);

/// Convex majorant of d_k^2 d_b^2 around q_ref: the squared-sum term is kept
/// and the quartics are replaced by their tangents. Exact at q_ref.
double product_upper_bound_f(const Vec2& q, const Vec2& q_ref, const Vec2& w_k, const Vec2& w_b,
                             double altitude);

/// Concave minorant of d_k^2 d_e^2 around q_ref: the quartics are kept and
/// the squared-sum term is replaced by its tangent. Exact at q_ref.
double product_lower_bound_g(const Vec2& q, const Vec2& q_ref, const Vec2& w_k, const Vec2& w_e,
                             double altitude);

/// Tangent of the concave power v^(2/alpha) at v_ref; a global majorant,
/// exact at v_ref (and the identity when alpha = 2).
double concave_tangent_h(double v, double v_ref, double alpha);

struct TrajectoryStep {
  Trajectory trajectory;
  Eigen::MatrixXd Z;  // K x N slack (d_k d_b)^alpha, 0 on excluded pairs
  Eigen::MatrixXd V;  // K x N slack (d_k d_e)^alpha
  double zeta_surrogate = 0.0;
  bool solver_ok = false;
  SolveReport report;
};

/// One convexified step of the trajectory design around Q_ref with the
/// coherent-cap eavesdropper model. Slots whose incumbent margin is not
/// positive are excluded from this step's objective. On solver failure the
/// reference trajectory is returned unchanged with solver_ok = false.
TrajectoryStep solve_trajectory_subproblem(const Eigen::MatrixXd& assoc_binary,
                                           const Eigen::MatrixXd& power,
                                           const Trajectory& Q_ref, const ScenarioConfig& cfg);

struct TrajectoryRunResult {
  Trajectory trajectory;
  PhaseSchedule phases;
  int sca_iterations = 0;
  bool solver_failure = false;
};

/// Scheme I block: alternates convexified trajectory steps with closed-form
/// phase realignment, accepting a step only when the exactly evaluated
/// minimum secrecy rate does not decrease. Silent slots keep their phases.
TrajectoryRunResult optimize_trajectory_s1(const Eigen::MatrixXd& assoc_binary,
                                           const Eigen::MatrixXd& power,
                                           const Trajectory& Q_init,
                                           const PhaseSchedule& theta_init,
                                           const ScenarioConfig& cfg);

/// Phase schedule with every served slot realigned at the given trajectory;
/// unserved slots copy the previous schedule.
PhaseSchedule realign_phases(const Trajectory& traj, const Eigen::MatrixXd& assoc_binary,
                             const PhaseSchedule& previous, const ScenarioConfig& cfg);

}  // namespace uavris

#endif  // UAVRIS_TRAJECTORY_S1_HPP
