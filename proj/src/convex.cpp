#include "uavris/convex.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace uavris {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLn2 = std::numbers::ln2;
}  // namespace

struct ConvexProgram::Atom {
  enum Kind { affine_le, soc, quad_epi, log_hypo, log1p_hypo, logfrac_epi, pow_hypo } kind;
  std::vector<LinExpr> exprs;  // layout depends on kind, see barrier()
  double c = 0.0;              // logfrac constant
  double p = 1.0;              // power exponent
  double nu() const {
    return kind == affine_le ? 1.0 : 2.0;
  }
};

int ConvexProgram::add_variable(double warm, double lb, double ub, double scale) {
  if (lb > ub) throw Error("variable bounds crossed");
  const double span = std::min(ub, 1e30) - std::max(lb, -1e30);
  const double shift = 1e-9 * std::max({std::abs(lb), std::abs(ub), std::abs(warm), 1.0});
  double w = warm;
  if (std::isfinite(lb)) w = std::max(w, lb + std::min(shift, 0.25 * span));
  if (std::isfinite(ub)) w = std::min(w, ub - std::min(shift, 0.25 * span));
  warm_.push_back(w);
  lb_.push_back(lb);
  ub_.push_back(ub);
  scale_.push_back(scale > 0.0 ? scale : std::max(std::abs(w), 1.0));
  return static_cast<int>(warm_.size()) - 1;
}

int ConvexProgram::add_free_variable(double warm, double scale) {
  return add_variable(warm, -kInf, kInf, scale);
}

void ConvexProgram::maximize(const LinExpr& objective) { objective_ = objective; }

void ConvexProgram::add_linear_le(const LinExpr& lhs, const LinExpr& rhs) {
  LinExpr e = lhs;
  e.add(rhs, -1.0);
  atoms_.push_back({Atom::affine_le, {std::move(e)}});
}

void ConvexProgram::add_linear_eq(const LinExpr& lhs, const LinExpr& rhs) {
  LinExpr e = lhs;
  e.add(rhs, -1.0);
  equalities_.push_back({std::move(e), 0});
}

void ConvexProgram::add_soc(std::vector<LinExpr> u, LinExpr s) {
  std::vector<LinExpr> ex;
  ex.reserve(u.size() + 1);
  ex.push_back(std::move(s));
  for (auto& e : u) ex.push_back(std::move(e));
  atoms_.push_back({Atom::soc, std::move(ex)});
}

void ConvexProgram::add_quad_epi(std::vector<LinExpr> u, LinExpr y) {
  std::vector<LinExpr> ex;
  ex.reserve(u.size() + 1);
  ex.push_back(std::move(y));
  for (auto& e : u) ex.push_back(std::move(e));
  atoms_.push_back({Atom::quad_epi, std::move(ex)});
}

void ConvexProgram::add_log_hypo(LinExpr t, LinExpr u) {
  atoms_.push_back({Atom::log_hypo, {std::move(t), std::move(u)}});
}

void ConvexProgram::add_log1p_hypo(LinExpr t, LinExpr e) {
  atoms_.push_back({Atom::log1p_hypo, {std::move(t), std::move(e)}});
}

void ConvexProgram::add_logfrac_epi(LinExpr t, double c, LinExpr u) {
  if (!(c >= 0.0)) throw Error("logfrac constant must be nonnegative");
  Atom a{Atom::logfrac_epi, {std::move(t), std::move(u)}};
  a.c = c;
  atoms_.push_back(std::move(a));
}

void ConvexProgram::add_pow_hypo(LinExpr t, LinExpr u, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error("power hypograph exponent must be in (0, 1]");
  Atom a{Atom::pow_hypo, {std::move(t), std::move(u)}};
  a.p = p;
  atoms_.push_back(std::move(a));
}

Eigen::VectorXd ConvexProgram::warm_start() const {
  return Eigen::Map<const Eigen::VectorXd>(warm_.data(), static_cast<long>(warm_.size()));
}

// ---------------------------------------------------------------------------
// Barrier machinery. All expressions are rescaled once (x = S * y), and the
// method runs in y-space: gradient/Hessian contributions per atom are chained
// through the affine expression coefficients.
// ---------------------------------------------------------------------------

struct ProgramImpl {
  using Atom = ConvexProgram::Atom;

  const ConvexProgram& prog;
  int n = 0;
  std::vector<Atom> atoms;               // scaled, plus bound atoms
  std::vector<LinExpr> equalities;       // scaled, == 0
  LinExpr objective;                     // scaled
  Eigen::VectorXd scale;

  explicit ProgramImpl(const ConvexProgram& p) : prog(p) {
    n = p.num_variables();
    scale.resize(n);
    for (int i = 0; i < n; ++i) scale[i] = p.scale_[static_cast<size_t>(i)];

    atoms = p.atoms_;
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(p.lb_[static_cast<size_t>(i)])) {
        LinExpr e(p.lb_[static_cast<size_t>(i)]);
        e.add(i, -1.0);  // lb - x <= 0
        atoms.push_back({Atom::affine_le, {std::move(e)}});
      }
      if (std::isfinite(p.ub_[static_cast<size_t>(i)])) {
        LinExpr e(-p.ub_[static_cast<size_t>(i)]);
        e.add(i, 1.0);  // x - ub <= 0
        atoms.push_back({Atom::affine_le, {std::move(e)}});
      }
    }
    for (auto& a : atoms)
      for (auto& e : a.exprs) e = rescale(e);
    // Normalize affine rows so margins are O(1) relative quantities.
    for (auto& a : atoms) {
      if (a.kind != Atom::affine_le) continue;
      double m = std::max(a.exprs[0].max_abs_coeff(), std::abs(a.exprs[0].constant()));
      if (m > 0.0) a.exprs[0].scale(1.0 / m);
    }
    for (const auto& [e, tag] : p.equalities_) equalities.push_back(rescale(e));
    objective = rescale(p.objective_);
  }

  LinExpr rescale(const LinExpr& e) const {
    LinExpr out(e.constant());
    for (const auto& [idx, coeff] : e.terms()) out.add(idx, coeff * scale[idx]);
    return out;
  }

  // Margins that the barrier keeps strictly positive.
  void margins(const Atom& a, const Eigen::VectorXd& y, double* out, int* count) const {
    switch (a.kind) {
      case Atom::affine_le:
        out[0] = -a.exprs[0].eval(y);
        *count = 1;
        return;
      case Atom::soc: {
        const double s = a.exprs[0].eval(y);
        double q = 0.0;
        for (size_t i = 1; i < a.exprs.size(); ++i) {
          const double v = a.exprs[i].eval(y);
          q += v * v;
        }
        out[0] = s;
        out[1] = s * s - q;
        *count = 2;
        return;
      }
      case Atom::quad_epi: {
        double q = 0.0;
        for (size_t i = 1; i < a.exprs.size(); ++i) {
          const double v = a.exprs[i].eval(y);
          q += v * v;
        }
        out[0] = a.exprs[0].eval(y) - q;
        *count = 1;
        return;
      }
      case Atom::log_hypo: {
        const double u = a.exprs[1].eval(y);
        out[0] = u;
        out[1] = u > 0.0 ? std::log2(u) - a.exprs[0].eval(y) : -1.0;
        *count = 2;
        return;
      }
      case Atom::log1p_hypo: {
        const double w = 1.0 + a.exprs[1].eval(y);
        out[0] = w;
        out[1] = w > 0.0 ? std::log1p(a.exprs[1].eval(y)) / kLn2 - a.exprs[0].eval(y) : -1.0;
        *count = 2;
        return;
      }
      case Atom::logfrac_epi: {
        const double u = a.exprs[1].eval(y);
        out[0] = u;
        out[1] = u > 0.0 ? a.exprs[0].eval(y) - std::log1p(a.c / u) / kLn2 : -1.0;
        *count = 2;
        return;
      }
      case Atom::pow_hypo: {
        const double u = a.exprs[1].eval(y);
        out[0] = u;
        out[1] = u > 0.0 ? std::pow(u, a.p) - a.exprs[0].eval(y) : -1.0;
        *count = 2;
        return;
      }
    }
    *count = 0;
  }

  bool strictly_feasible(const Eigen::VectorXd& y) const {
    double m[2];
    int c = 0;
    for (const auto& a : atoms) {
      margins(a, y, m, &c);
      for (int i = 0; i < c; ++i)
        if (!(m[i] > 0.0) || !std::isfinite(m[i])) return false;
    }
    return true;
  }

  double barrier_value(const Eigen::VectorXd& y) const {
    double phi = 0.0;
    double m[2];
    int c = 0;
    for (const auto& a : atoms) {
      margins(a, y, m, &c);
      for (int i = 0; i < c; ++i) {
        if (!(m[i] > 0.0)) return kInf;
        phi -= std::log(m[i]);
      }
    }
    return phi;
  }

  double total_nu() const {
    double nu = 0.0;
    for (const auto& a : atoms) nu += a.nu();
    return nu;
  }

  // Accumulates gradient and Hessian of the barrier at y.
  void barrier_derivatives(const Eigen::VectorXd& y, Eigen::VectorXd& g,
                           Eigen::MatrixXd& H) const {
    for (const auto& a : atoms) {
      switch (a.kind) {
        case Atom::affine_le: {
          const double m = -a.exprs[0].eval(y);
          add_rank1(H, a.exprs[0], 1.0 / (m * m));
          a.exprs[0].scatter(g, 1.0 / m);
          break;
        }
        case Atom::soc: {
          const double s = a.exprs[0].eval(y);
          const size_t d = a.exprs.size() - 1;
          std::vector<double> uv(d);
          double q = 0.0;
          for (size_t i = 0; i < d; ++i) {
            uv[i] = a.exprs[i + 1].eval(y);
            q += uv[i] * uv[i];
          }
          const double m = s * s - q;
          // grad(-ln m) = -(1/m) * dm ; dm = 2s ds - 2 u_i du_i
          a.exprs[0].scatter(g, -2.0 * s / m);
          for (size_t i = 0; i < d; ++i) a.exprs[i + 1].scatter(g, 2.0 * uv[i] / m);
          // Hess = (1/m^2) dm dm^T - (1/m) d2m, d2m = diag(2, -2, ..., -2)
          LinExpr dm;
          dm.add(a.exprs[0], 2.0 * s);
          for (size_t i = 0; i < d; ++i) dm.add(a.exprs[i + 1], -2.0 * uv[i]);
          add_rank1(H, dm, 1.0 / (m * m));
          add_rank1(H, a.exprs[0], -2.0 / m);
          for (size_t i = 0; i < d; ++i) add_rank1(H, a.exprs[i + 1], 2.0 / m);
          break;
        }
        case Atom::quad_epi: {
          const size_t d = a.exprs.size() - 1;
          std::vector<double> uv(d);
          double q = 0.0;
          for (size_t i = 0; i < d; ++i) {
            uv[i] = a.exprs[i + 1].eval(y);
            q += uv[i] * uv[i];
          }
          const double m = a.exprs[0].eval(y) - q;
          a.exprs[0].scatter(g, -1.0 / m);
          for (size_t i = 0; i < d; ++i) a.exprs[i + 1].scatter(g, 2.0 * uv[i] / m);
          LinExpr dm = a.exprs[0];
          for (size_t i = 0; i < d; ++i) dm.add(a.exprs[i + 1], -2.0 * uv[i]);
          add_rank1(H, dm, 1.0 / (m * m));
          for (size_t i = 0; i < d; ++i) add_rank1(H, a.exprs[i + 1], 2.0 / m);
          break;
        }
        case Atom::log_hypo:
        case Atom::log1p_hypo: {
          const bool shifted = a.kind == Atom::log1p_hypo;
          const double raw = a.exprs[1].eval(y);
          const double u = shifted ? 1.0 + raw : raw;
          const double gmargin = (shifted ? std::log1p(raw) : std::log(raw)) / kLn2 -
                                 a.exprs[0].eval(y);
          // dg/dt = -1, dg/du = 1/(u ln2), d2g/du2 = -1/(u^2 ln2)
          const double du = 1.0 / (u * kLn2);
          a.exprs[0].scatter(g, 1.0 / gmargin);
          a.exprs[1].scatter(g, -du / gmargin - 1.0 / u);
          LinExpr dg;
          dg.add(a.exprs[0], -1.0);
          dg.add(a.exprs[1], du);
          add_rank1(H, dg, 1.0 / (gmargin * gmargin));
          add_rank1(H, a.exprs[1], 1.0 / (gmargin * u * u * kLn2) + 1.0 / (u * u));
          break;
        }
        case Atom::logfrac_epi: {
          const double u = a.exprs[1].eval(y);
          const double gmargin = a.exprs[0].eval(y) - std::log1p(a.c / u) / kLn2;
          // dg/dt = 1, dg/du = c / (u (u + c) ln2)
          const double du = a.c / (u * (u + a.c) * kLn2);
          const double d2u = (1.0 / (u * u) - 1.0 / ((u + a.c) * (u + a.c))) / kLn2;
          a.exprs[0].scatter(g, -1.0 / gmargin);
          a.exprs[1].scatter(g, -du / gmargin - 1.0 / u);
          LinExpr dg = a.exprs[0];
          dg.add(a.exprs[1], du);
          add_rank1(H, dg, 1.0 / (gmargin * gmargin));
          add_rank1(H, a.exprs[1], d2u / gmargin + 1.0 / (u * u));
          break;
        }
        case Atom::pow_hypo: {
          const double u = a.exprs[1].eval(y);
          const double up = std::pow(u, a.p);
          const double gmargin = up - a.exprs[0].eval(y);
          const double du = a.p * up / u;                       // p u^(p-1)
          const double d2u = a.p * (a.p - 1.0) * up / (u * u);  // <= 0
          a.exprs[0].scatter(g, 1.0 / gmargin);
          a.exprs[1].scatter(g, -du / gmargin - 1.0 / u);
          LinExpr dg;
          dg.add(a.exprs[0], -1.0);
          dg.add(a.exprs[1], du);
          add_rank1(H, dg, 1.0 / (gmargin * gmargin));
          add_rank1(H, a.exprs[1], -d2u / gmargin + 1.0 / (u * u));
          break;
        }
      }
    }
  }

  static void add_rank1(Eigen::MatrixXd& H, const LinExpr& e, double w) {
    const auto& terms = e.terms();
    for (const auto& [i, ci] : terms)
      for (const auto& [j, cj] : terms) H(i, j) += w * ci * cj;
  }

  double violation(const Eigen::VectorXd& y) const {
    double worst = 0.0;
    double m[2];
    int c = 0;
    for (const auto& a : atoms) {
      margins(a, y, m, &c);
      for (int i = 0; i < c; ++i) worst = std::max(worst, -m[i]);
    }
    for (const auto& e : equalities) worst = std::max(worst, std::abs(e.eval(y)));
    return worst;
  }
};

SolveReport ConvexProgram::solve(const SolveOptions& opts) const {
  SolveReport rep;
  const int n = num_variables();
  if (n == 0) {
    rep.status = SolveStatus::optimal;
    rep.objective = objective_.constant();
    rep.x.resize(0);
    return rep;
  }

  ProgramImpl impl(*this);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = warm_[static_cast<size_t>(i)] / impl.scale[i];

  if (!impl.strictly_feasible(y)) {
    rep.status = SolveStatus::numerical_failure;
    rep.message = "warm start is not strictly feasible";
    rep.x = impl.scale.cwiseProduct(y);
    rep.objective = objective_.eval(rep.x);
    rep.max_violation = impl.violation(y);
    return rep;
  }

  const double cmax = std::max(impl.objective.max_abs_coeff(), 0.0);
  if (cmax == 0.0) {
    rep.status = SolveStatus::optimal;
    rep.x = impl.scale.cwiseProduct(y);
    rep.objective = objective_.eval(rep.x);
    return rep;
  }
  LinExpr cn = impl.objective;
  cn.scale(1.0 / cmax);

  Eigen::VectorXd c_vec = Eigen::VectorXd::Zero(n);
  cn.scatter(c_vec, 1.0);

  const int m_eq = static_cast<int>(impl.equalities.size());
  Eigen::MatrixXd A_eq(m_eq, n);
  if (m_eq > 0) {
    A_eq.setZero();
    for (int r = 0; r < m_eq; ++r) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
      impl.equalities[static_cast<size_t>(r)].scatter(row, 1.0);
      A_eq.row(r) = row.transpose();
    }
  }

  const double nu = impl.total_nu();
  double t = nu / std::max(1.0, std::abs(cn.eval(y)));
  const double mu = 30.0;

  Eigen::VectorXd best_y = y;
  double best_obj = cn.eval(y);

  Eigen::VectorXd grad(n);
  Eigen::MatrixXd H(n, n);
  int total_newton = 0;
  bool stuck = false;

  for (int stage = 0; stage < opts.max_stages; ++stage) {
    rep.barrier_stages = stage + 1;
    for (int it = 0; it < 60 && total_newton < opts.max_newton; ++it, ++total_newton) {
      grad = -t * c_vec;
      H.setZero();
      impl.barrier_derivatives(y, grad, H);

      Eigen::VectorXd step(n);
      bool solved = false;
      double ridge = 0.0;
      for (int attempt = 0; attempt < 6 && !solved; ++attempt) {
        Eigen::MatrixXd Hr = H;
        if (ridge > 0.0) Hr.diagonal().array() += ridge;
        if (m_eq == 0) {
          Eigen::LDLT<Eigen::MatrixXd> ldlt(Hr);
          if (ldlt.info() == Eigen::Success) {
            step = ldlt.solve(-grad);
            solved = step.allFinite();
          }
        } else {
          Eigen::MatrixXd KKT = Eigen::MatrixXd::Zero(n + m_eq, n + m_eq);
          KKT.topLeftCorner(n, n) = Hr;
          KKT.topRightCorner(n, m_eq) = A_eq.transpose();
          KKT.bottomLeftCorner(m_eq, n) = A_eq;
          Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m_eq);
          rhs.head(n) = -grad;
          Eigen::FullPivLU<Eigen::MatrixXd> lu(KKT);
          if (lu.isInvertible()) {
            Eigen::VectorXd sol = lu.solve(rhs);
            step = sol.head(n);
            solved = step.allFinite();
          }
        }
        if (!solved) ridge = ridge == 0.0 ? 1e-10 * (1.0 + H.diagonal().maxCoeff()) : ridge * 100.0;
      }
      if (!solved) {
        stuck = true;
        break;
      }

      const double dec = -grad.dot(step);
      if (!(dec > 0.0)) break;  // ascent direction lost to rounding: stage done
      if (0.5 * dec <= 1e-9) break;

      const double f0 = -t * cn.eval(y) + impl.barrier_value(y);
      double alpha = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 90; ++ls) {
        Eigen::VectorXd cand = y + alpha * step;
        if (impl.strictly_feasible(cand)) {
          const double f1 = -t * cn.eval(cand) + impl.barrier_value(cand);
          if (f1 <= f0 - 0.25 * alpha * dec) {
            y = cand;
            accepted = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        stuck = true;
        break;
      }
    }

    const double obj = cn.eval(y);
    if (obj > best_obj) {
      best_obj = obj;
      best_y = y;
    }
    const double gap = nu / t;
    if (gap <= opts.rel_tol * std::max(1.0, std::abs(obj))) {
      rep.status = SolveStatus::optimal;
      break;
    }
    if (stuck || total_newton >= opts.max_newton) {
      rep.status = stuck ? SolveStatus::numerical_failure : SolveStatus::max_iterations;
      rep.message = stuck ? "newton step stalled" : "newton budget exhausted";
      break;
    }
    t *= mu;
    rep.status = SolveStatus::max_iterations;  // overwritten on gap convergence
  }

  rep.newton_iterations = total_newton;
  // Never hand back less than the best point seen (the warm start included).
  Eigen::VectorXd y_out = best_obj >= cn.eval(y) ? best_y : y;
  rep.x = impl.scale.cwiseProduct(y_out);
  rep.objective = objective_.eval(rep.x);
  rep.max_violation = std::max(0.0, impl.violation(y_out));
  return rep;
}

// ---------------------------------------------------------------------------
// Verification oracles.
// ---------------------------------------------------------------------------

GridResult grid_oracle(const std::function<double(std::span<const double>)>& f,
                       std::span<const std::pair<double, double>> box, int resolution) {
  const size_t dims = box.size();
  if (dims == 0 || dims > 4) throw Error("grid_oracle supports 1 to 4 dimensions");
  if (resolution < 2) throw Error("grid_oracle resolution must be >= 2");

  std::vector<int> idx(dims, 0);
  std::vector<double> pt(dims);
  GridResult best;
  best.value = -kInf;
  while (true) {
    for (size_t d = 0; d < dims; ++d) {
      const auto& [lo, hi] = box[d];
      pt[d] = lo + (hi - lo) * static_cast<double>(idx[d]) / (resolution - 1);
    }
    const double v = f(pt);
    if (v > best.value) {
      best.value = v;
      best.point = pt;
    }
    size_t d = 0;
    while (d < dims && ++idx[d] == resolution) {
      idx[d] = 0;
      ++d;
    }
    if (d == dims) break;
  }
  return best;
}

bool hessian_psd_check(const std::function<double(std::span<const double>)>& f,
                       std::span<const double> point, double step) {
  const int n = static_cast<int>(point.size());
  std::vector<double> x(point.begin(), point.end());
  auto eval = [&](const std::vector<double>& p) { return f(std::span<const double>(p)); };

  Eigen::MatrixXd H(n, n);
  const double f0 = eval(x);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::vector<double> p = x;
      double v;
      if (i == j) {
        p[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] + step;
        const double fp = eval(p);
        p[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] - step;
        const double fm = eval(p);
        v = (fp - 2.0 * f0 + fm) / (step * step);
      } else {
        auto at = [&](double si, double sj) {
          p = x;
          p[static_cast<size_t>(i)] += si;
          p[static_cast<size_t>(j)] += sj;
          return eval(p);
        };
        v = (at(step, step) - at(step, -step) - at(-step, step) + at(-step, -step)) /
            (4.0 * step * step);
      }
      H(i, j) = v;
      H(j, i) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  return lo >= -1e-6 * (1.0 + std::abs(hi));
}

}  // namespace uavris
