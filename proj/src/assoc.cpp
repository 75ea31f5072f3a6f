#include "uavris/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uavris {

AssociationLp solve_association_lp(const Eigen::MatrixXd& R) {
  const int K = static_cast<int>(R.rows());
  const int N = static_cast<int>(R.cols());
  if (K < 1 || N < 1) throw Error("association matrix must be nonempty");
  if ((R.array() < 0.0).any()) throw Error("association rates must be clamped nonnegative");

  const double r_scale = std::max(R.maxCoeff(), 1e-300);

  ConvexProgram prog;
  Eigen::MatrixXi var(K, N);
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < K; ++k)
      var(k, n) = prog.add_variable(0.5 / K, 0.0, 1.0, 1.0);

  // Strictly feasible zeta below every user's average at the warm point.
  double warm_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    double avg = 0.0;
    for (int n = 0; n < N; ++n) avg += (0.5 / K) * R(k, n);
    warm_min = std::min(warm_min, avg / N);
  }
  const int zeta = prog.add_free_variable(warm_min - 0.05 * r_scale - 1e-12, r_scale);

  for (int k = 0; k < K; ++k) {
    LinExpr avg;
    for (int n = 0; n < N; ++n) avg.add(var(k, n), R(k, n) / N);
    prog.add_linear_le(LinExpr::var(zeta), avg);
  }
  for (int n = 0; n < N; ++n) {
    LinExpr sum;
    for (int k = 0; k < K; ++k) sum.add(var(k, n), 1.0);
    prog.add_linear_le(sum, 1.0);
  }
  prog.maximize(LinExpr::var(zeta));

  AssociationLp out;
  out.report = prog.solve();
  out.fractional = Eigen::MatrixXd::Zero(K, N);
  for (int n = 0; n < N; ++n) {
    for (int k = 0; k < K; ++k) {
      double a = std::clamp(out.report.x[var(k, n)], 0.0, 1.0);
      if (R(k, n) <= 0.0 || a < 1e-12) a = 0.0;  // sparse among optima
      out.fractional(k, n) = a;
    }
  }
  out.zeta = std::max(0.0, out.report.x[zeta]);
  return out;
}

Eigen::MatrixXd round_association(const Eigen::MatrixXd& fractional) {
  const int K = static_cast<int>(fractional.rows());
  const int N = static_cast<int>(fractional.cols());
  Eigen::MatrixXd binary = Eigen::MatrixXd::Zero(K, N);
  for (int n = 0; n < N; ++n) {
    int best = -1;
    double best_val = 1e-6;
    for (int k = 0; k < K; ++k) {
      if (fractional(k, n) > best_val) {  // strict: ties keep the lowest index
        best_val = fractional(k, n);
        best = k;
      }
    }
    if (best >= 0) binary(best, n) = 1.0;
  }
  return binary;
}

}  // namespace uavris
