#ifndef UAVRIS_ASSOC_HPP
#define UAVRIS_ASSOC_HPP

#include <Eigen/Core>

#include "uavris/convex.hpp"

namespace uavris {

struct AssociationLp {
  Eigen::MatrixXd fractional;  // K x N, entries in [0, 1]
  double zeta = 0.0;           // LP optimum (clamped at 0)
  SolveReport report;
};

/// Relaxed scheduling problem: maximize the minimum per-user average of
/// a_k[n] * R(k, n) subject to at most one served user per slot and
/// 0 <= a <= 1. Entries of R must be nonnegative (already clamped).
/// Among equally optimal solutions the sparse one is returned: fractions on
/// zero-rate pairs are set to 0, which lets useless slots round to silence.
AssociationLp solve_association_lp(const Eigen::MatrixXd& R);

/// Integer recovery: per slot the largest fraction wins when it exceeds
/// 1e-6 (ties to the lowest user index); otherwise the slot stays silent.
Eigen::MatrixXd round_association(const Eigen::MatrixXd& fractional);

}  // namespace uavris

#endif  // UAVRIS_ASSOC_HPP
