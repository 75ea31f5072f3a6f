#ifndef UAVRIS_CONVEX_HPP
#define UAVRIS_CONVEX_HPP

#include <Eigen/Core>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uavris/types.hpp"

namespace uavris {

/// Sparse affine expression sum_i coeff_i * x_i + constant.
class LinExpr {
 public:
  LinExpr() = default;
  /*implicit*/ LinExpr(double constant) : constant_(constant) {}

  static LinExpr var(int index, double coeff = 1.0) {
    LinExpr e;
    e.add(index, coeff);
    return e;
  }

  LinExpr& add(int index, double coeff) {
    if (coeff != 0.0) terms_.push_back({index, coeff});
    return *this;
  }
  LinExpr& add(const LinExpr& other, double scale = 1.0) {
    constant_ += scale * other.constant_;
    for (const auto& t : other.terms_) add(t.first, scale * t.second);
    return *this;
  }
  LinExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }
  LinExpr& scale(double s) {
    constant_ *= s;
    for (auto& t : terms_) t.second *= s;
    return *this;
  }

  double constant() const { return constant_; }
  const std::vector<std::pair<int, double>>& terms() const { return terms_; }

  double eval(const Eigen::VectorXd& x) const {
    double v = constant_;
    for (const auto& t : terms_) v += t.second * x[t.first];
    return v;
  }
  void scatter(Eigen::VectorXd& g, double w) const {
    for (const auto& t : terms_) g[t.first] += w * t.second;
  }
  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.second));
    return m;
  }

 private:
  std::vector<std::pair<int, double>> terms_;
  double constant_ = 0.0;
};

enum class SolveStatus { optimal, max_iterations, numerical_failure };

struct SolveReport {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd x;
  double objective = 0.0;      // maximized value at x
  double max_violation = 0.0;  // worst constraint residual at x (0 when feasible)
  int newton_iterations = 0;
  int barrier_stages = 0;
  std::string message;
};

struct SolveOptions {
  double rel_tol = 1e-6;    // relative optimality target
  double feas_tol = 1e-7;   // reported-feasibility tolerance
  int max_newton = 4000;
  int max_stages = 60;
};

/// Maximization of a linear objective over an intersection of convex atoms:
/// affine equalities/inequalities, second-order cones, quadratic epigraphs,
/// log hypographs/epigraphs and concave-power hypographs. Solved with a
/// primal barrier method; the caller supplies a strictly feasible start
/// through the per-variable warm values.
class ConvexProgram {
 public:
  /// Adds a variable with a strictly feasible warm value. `scale` should be
  /// the variable's natural magnitude; 0 selects max(|warm|, 1).
  int add_variable(double warm, double lb, double ub, double scale = 0.0);
  int add_free_variable(double warm, double scale = 0.0);

  void maximize(const LinExpr& objective);

  void add_linear_le(const LinExpr& lhs, const LinExpr& rhs);       // lhs <= rhs
  void add_linear_eq(const LinExpr& lhs, const LinExpr& rhs);       // lhs == rhs
  void add_soc(std::vector<LinExpr> u, LinExpr s);                  // ||u|| <= s
  void add_quad_epi(std::vector<LinExpr> u, LinExpr y);             // ||u||^2 <= y
  void add_log_hypo(LinExpr t, LinExpr u);                          // t <= log2(u)
  void add_log1p_hypo(LinExpr t, LinExpr e);                        // t <= log2(1 + e)
  void add_logfrac_epi(LinExpr t, double c, LinExpr u);             // t >= log2(1 + c/u)
  void add_pow_hypo(LinExpr t, LinExpr u, double p);                // t <= u^p, 0 < p <= 1

  int num_variables() const { return static_cast<int>(warm_.size()); }
  Eigen::VectorXd warm_start() const;

  SolveReport solve(const SolveOptions& opts = {}) const;

 private:
  struct Atom;
  std::vector<double> warm_, lb_, ub_, scale_;
  std::vector<Atom> atoms_;
  std::vector<std::pair<LinExpr, int>> equalities_;  // expr == 0
  LinExpr objective_;
  friend struct ProgramImpl;
};

/// Exhaustive grid maximizer over a box, for test verification only.
/// Throws Error when the box has more than four dimensions.
struct GridResult {
  std::vector<double> point;
  double value = 0.0;
};
GridResult grid_oracle(const std::function<double(std::span<const double>)>& f,
                       std::span<const std::pair<double, double>> box, int resolution);

/// Central finite-difference Hessian test: true iff every eigenvalue is
/// >= -1e-6 * (1 + |largest eigenvalue|).
bool hessian_psd_check(const std::function<double(std::span<const double>)>& f,
                       std::span<const double> point, double step);

}  // namespace uavris

#endif  // UAVRIS_CONVEX_HPP
