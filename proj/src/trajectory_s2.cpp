#include "uavris/trajectory_s2.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "uavris/channel.hpp"

namespace uavris {

namespace {
const double kLn2 = std::numbers::ln2;
const double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

double sq(double x) { return x * x; }
}  // namespace

double approx_aoa(const Vec2& q, const Vec2& w, double d_ref) {
  return (q.x - w.x) / d_ref;
}

PhaseSumTangent linearize_phase_sum(std::span<const double> t_ref) {
  PhaseSumTangent out;
  out.t_ref.assign(t_ref.begin(), t_ref.end());
  double sc = 0.0, ss = 0.0;
  for (double t : t_ref) {
    sc += std::cos(t);
    ss += std::sin(t);
  }
  out.value_ref = sc * sc + ss * ss;
  out.grad.resize(t_ref.size());
  for (size_t m = 0; m < t_ref.size(); ++m)
    out.grad[m] = -2.0 * sc * std::sin(t_ref[m]) + 2.0 * ss * std::cos(t_ref[m]);
  return out;
}

double JointSecrecySurrogate::at(double z, double v, double ge, double gb) const {
  return std::log2((z + coupling * gb) / z_ref) - (z - z_ref) / (kLn2 * z_ref) +
         std::log2(v / c_v) - (v - v_ref) / (kLn2 * c_v) -
         coupling * (ge - ge_ref) / (kLn2 * c_v);
}

JointSecrecySurrogate make_joint_surrogate(double z_ref, double v_ref, double ge_ref,
                                           double coupling) {
  JointSecrecySurrogate s;
  s.z_ref = z_ref;
  s.v_ref = v_ref;
  s.ge_ref = ge_ref;
  s.coupling = coupling;
  s.c_v = v_ref + coupling * ge_ref;
  return s;
}

namespace {

struct JointSlot {
  int n = 0, k = 0;
  Vec2 q_ref, w_k;
  double coupling = 0.0;  // p h0^2 / sigma^2
  double d_k_ref = 0.0, d_b_ref = 0.0, d_e_ref = 0.0;
  double z_ref = 0.0, v_ref = 0.0;
  std::vector<double> theta_ref;
  PhaseSumTangent eve_sum, bs_sum;
  JointSecrecySurrogate surrogate;
  std::vector<int> theta;
  int z = -1, v = -1, tb = -1, tv = -1, t1 = -1, t2 = -1;
  int ud_k = -1, uq_k = -1, ud_e = -1, uq_e = -1;
};

struct JointStep {
  Trajectory trajectory;
  PhaseSchedule phases;
  bool solver_ok = false;
  SolveReport report;
};

JointStep solve_joint_subproblem(const Eigen::MatrixXd& assoc_binary,
                                 const Eigen::MatrixXd& power, const Trajectory& Q_ref,
                                 const PhaseSchedule& theta_ref_sched,
                                 const ScenarioConfig& cfg) {
  const int K = cfg.num_users;
  const int N = cfg.num_slots;
  const int M = cfg.ris_elements;
  const double H = cfg.altitude_m;
  const double alpha = cfg.pathloss_exp;
  const double s_max = cfg.s_max();
  const double m2 = static_cast<double>(M) * M;

  JointStep out;
  out.trajectory = Q_ref;
  out.phases = theta_ref_sched;

  const double z_lb = std::pow(H, 2.0 * alpha);
  const double v_lb = z_lb * 1e-6;

  std::vector<JointSlot> slots;
  double rate_scale = 1e-12;
  for (int n = 1; n <= N; ++n) {
    int served = -1;
    for (int k = 0; k < K; ++k)
      if (assoc_binary(k, n - 1) > 0.5) {
        served = k;
        break;
      }
    if (served < 0 || power(served, n - 1) <= 0.0) continue;
    JointSlot s;
    s.n = n;
    s.k = served;
    s.q_ref = Q_ref.at(n);
    s.w_k = cfg.user_pos[static_cast<size_t>(served)];
    s.coupling = power(served, n - 1) * cfg.ref_gain * cfg.ref_gain / cfg.noise_w;
    s.d_k_ref = distance(s.q_ref, s.w_k, H);
    s.d_b_ref = distance(s.q_ref, cfg.bs_pos, H);
    s.d_e_ref = distance(s.q_ref, cfg.eve_pos, H);
    s.z_ref = std::pow(s.d_k_ref * s.d_b_ref, alpha);
    s.v_ref = std::max(std::pow(s.d_k_ref * s.d_e_ref, alpha), v_lb * (1.0 + 1e-6));

    s.theta_ref.resize(static_cast<size_t>(M));
    for (int m = 0; m < M; ++m)
      s.theta_ref[static_cast<size_t>(m)] =
          std::clamp(wrap_angle(theta_ref_sched.at(m, n)), 1e-8, kTwoPi - 1e-8);

    const double phi_k = aoa_cosine(s.q_ref, s.w_k, H);
    const double phi_b = aoa_cosine(s.q_ref, cfg.bs_pos, H);
    const double phi_e = aoa_cosine(s.q_ref, cfg.eve_pos, H);
    const double u_ref = phi_e - phi_k;
    const double l_ref = phi_b - phi_k;
    std::vector<double> t_ref(static_cast<size_t>(M)), s_ref(static_cast<size_t>(M));
    for (int m = 0; m < M; ++m) {
      const double c_m = kTwoPi * cfg.element_spacing_ratio * static_cast<double>(m);
      t_ref[static_cast<size_t>(m)] = s.theta_ref[static_cast<size_t>(m)] + c_m * u_ref;
      s_ref[static_cast<size_t>(m)] = s.theta_ref[static_cast<size_t>(m)] + c_m * l_ref;
    }
    s.eve_sum = linearize_phase_sum(t_ref);
    s.bs_sum = linearize_phase_sum(s_ref);
    s.surrogate = make_joint_surrogate(s.z_ref, s.v_ref, s.eve_sum.value_ref, s.coupling);

    const double margin =
        s.surrogate.at(s.z_ref, s.v_ref, s.eve_sum.value_ref, s.bs_sum.value_ref);
    if (margin <= 0.0) continue;  // clamped pair adds nothing this step
    rate_scale =
        std::max(rate_scale, std::log1p(s.coupling * s.bs_sum.value_ref / s.z_ref) / kLn2);
    slots.push_back(std::move(s));
  }
  if (slots.empty()) {
    out.solver_ok = true;
    out.report.status = SolveStatus::optimal;
    return out;
  }

  double coord_scale = std::max({H, s_max, 1.0});
  for (const auto& pt : Q_ref.points)
    coord_scale = std::max({coord_scale, std::abs(pt.x), std::abs(pt.y)});

  ConvexProgram prog;
  std::vector<int> qx(static_cast<size_t>(N) + 1, -1), qy(static_cast<size_t>(N) + 1, -1);
  for (int n = 1; n < N; ++n) {
    qx[static_cast<size_t>(n)] = prog.add_free_variable(Q_ref.at(n).x, coord_scale);
    qy[static_cast<size_t>(n)] = prog.add_free_variable(Q_ref.at(n).y, coord_scale);
  }
  auto qx_expr = [&](int n) {
    return n == 0 || n == N ? LinExpr(Q_ref.at(0).x) : LinExpr::var(qx[static_cast<size_t>(n)]);
  };
  auto qy_expr = [&](int n) {
    return n == 0 || n == N ? LinExpr(Q_ref.at(0).y) : LinExpr::var(qy[static_cast<size_t>(n)]);
  };

  for (auto& s : slots) {
    s.theta.resize(static_cast<size_t>(M));
    for (int m = 0; m < M; ++m)
      s.theta[static_cast<size_t>(m)] =
          prog.add_variable(s.theta_ref[static_cast<size_t>(m)], 0.0, kTwoPi, kTwoPi);
    const double d_k2 = sq(s.d_k_ref), d_b2 = sq(s.d_b_ref), d_e2 = sq(s.d_e_ref);
    const double s_kb = d_k2 + d_b2;
    s.z = prog.add_variable(s.z_ref * (1.0 + 1e-5), z_lb * (1.0 - 1e-9),
                            std::numeric_limits<double>::infinity(), s.z_ref);
    s.v = prog.add_variable(s.v_ref * (1.0 - 3e-5), v_lb,
                            std::numeric_limits<double>::infinity(), s.v_ref);
    s.t1 = prog.add_free_variable(s_kb * (1.0 + 1e-8), s_kb);
    s.t2 = prog.add_free_variable(sq(s_kb * (1.0 + 1e-8)) * (1.0 + 1e-8), sq(s_kb));
    s.ud_k = prog.add_free_variable(d_k2 * (1.0 + 1e-9), d_k2);
    s.uq_k = prog.add_free_variable(sq(d_k2 * (1.0 + 1e-9)) * (1.0 + 1e-9), sq(d_k2));
    s.ud_e = prog.add_free_variable(d_e2 * (1.0 + 1e-9), d_e2);
    s.uq_e = prog.add_free_variable(sq(d_e2 * (1.0 + 1e-9)) * (1.0 + 1e-9), sq(d_e2));
  }

  // Affine models shared by the rate constraints: tangent phase sums and the
  // affine remainder of the surrogate margin.
  struct SlotExprs {
    LinExpr ge, gb, rest;
  };
  std::vector<SlotExprs> exprs(slots.size());
  for (size_t i = 0; i < slots.size(); ++i) {
    auto& s = slots[i];
    const double inv_dk = 1.0 / s.d_k_ref;
    LinExpr u_expr(-cfg.eve_pos.x / s.d_e_ref + s.w_k.x * inv_dk);
    u_expr.add(qx_expr(s.n), 1.0 / s.d_e_ref - inv_dk);
    LinExpr l_expr(-cfg.bs_pos.x / s.d_b_ref + s.w_k.x * inv_dk);
    l_expr.add(qx_expr(s.n), 1.0 / s.d_b_ref - inv_dk);

    LinExpr ge(s.eve_sum.value_ref);
    LinExpr gb(s.bs_sum.value_ref);
    for (int m = 0; m < M; ++m) {
      const double c_m = kTwoPi * cfg.element_spacing_ratio * static_cast<double>(m);
      // t_m = theta_m + c_m u and s_m = theta_m + c_m l, exact identities
      LinExpr t_m = LinExpr::var(s.theta[static_cast<size_t>(m)]);
      t_m.add(u_expr, c_m);
      t_m.add_constant(-s.eve_sum.t_ref[static_cast<size_t>(m)]);
      ge.add(t_m, s.eve_sum.grad[static_cast<size_t>(m)]);
      LinExpr s_m = LinExpr::var(s.theta[static_cast<size_t>(m)]);
      s_m.add(l_expr, c_m);
      s_m.add_constant(-s.bs_sum.t_ref[static_cast<size_t>(m)]);
      gb.add(s_m, s.bs_sum.grad[static_cast<size_t>(m)]);
    }

    LinExpr rest;
    rest.add(s.z, -1.0 / (kLn2 * s.z_ref));
    rest.add_constant(1.0 / kLn2);
    rest.add(s.v, -1.0 / (kLn2 * s.surrogate.c_v));
    rest.add_constant(s.v_ref / (kLn2 * s.surrogate.c_v));
    rest.add(ge, -s.coupling / (kLn2 * s.surrogate.c_v));
    rest.add_constant(s.coupling * s.surrogate.ge_ref / (kLn2 * s.surrogate.c_v));

    exprs[i].ge = std::move(ge);
    exprs[i].gb = std::move(gb);
    exprs[i].rest = std::move(rest);
  }

  // Hypograph variables need warm values consistent with the rest of the
  // warm point, so they are created after the affine models exist.
  {
    Eigen::VectorXd warm = prog.warm_start();
    for (size_t i = 0; i < slots.size(); ++i) {
      auto& s = slots[i];
      const double z_w = warm[s.z];
      const double v_w = warm[s.v];
      const double gb_w = exprs[i].gb.eval(warm);
      const double tb_w =
          std::log2((z_w + s.coupling * gb_w) / s.z_ref) - 1e-7 * rate_scale - 1e-18;
      const double tv_w =
          std::log2(v_w / s.surrogate.c_v) - 1e-7 * rate_scale - 1e-18;
      s.tb = prog.add_free_variable(tb_w, std::max(rate_scale, 1e-9));
      s.tv = prog.add_free_variable(tv_w, std::max(std::abs(tv_w), rate_scale));
    }
  }

  std::vector<std::vector<size_t>> by_user(static_cast<size_t>(K));
  for (size_t i = 0; i < slots.size(); ++i)
    by_user[static_cast<size_t>(slots[i].k)].push_back(i);

  double warm_zeta = std::numeric_limits<double>::infinity();
  {
    Eigen::VectorXd warm = prog.warm_start();
    for (int k = 0; k < K; ++k) {
      if (by_user[static_cast<size_t>(k)].empty()) continue;
      double avg = 0.0;
      for (size_t i : by_user[static_cast<size_t>(k)])
        avg += (warm[slots[i].tb] + warm[slots[i].tv] + exprs[i].rest.eval(warm)) / N;
      warm_zeta = std::min(warm_zeta, avg);
    }
  }
  const int zeta_var =
      prog.add_free_variable(warm_zeta - 0.05 * rate_scale - 1e-15, rate_scale);

  for (int k = 0; k < K; ++k) {
    const auto& list = by_user[static_cast<size_t>(k)];
    if (list.empty()) continue;
    LinExpr rhs;
    for (size_t i : list) {
      rhs.add(slots[i].tb, 1.0 / N);
      rhs.add(slots[i].tv, 1.0 / N);
      rhs.add(exprs[i].rest, 1.0 / N);
    }
    prog.add_linear_le(LinExpr::var(zeta_var), rhs);
  }

  const double trust = std::min(s_max, 0.2 * H);
  for (size_t i = 0; i < slots.size(); ++i) {
    const auto& s = slots[i];

    LinExpr u_log = LinExpr::var(s.z, 1.0 / s.z_ref);
    u_log.add(exprs[i].gb, s.coupling / s.z_ref);
    prog.add_log_hypo(LinExpr::var(s.tb), std::move(u_log));
    prog.add_log_hypo(LinExpr::var(s.tv), LinExpr::var(s.v, 1.0 / s.surrogate.c_v));

    // Tangent phase sums stay inside the true range of |sum e^{jt}|^2.
    LinExpr ge_hi;
    ge_hi.add(exprs[i].ge, 1.0);
    prog.add_linear_le(std::move(ge_hi), LinExpr(m2 * (1.0 + 1e-6)));
    LinExpr ge_lo;
    ge_lo.add(exprs[i].ge, -1.0);
    prog.add_linear_le(std::move(ge_lo), LinExpr(1e-6 * m2));
    LinExpr gb_hi;
    gb_hi.add(exprs[i].gb, 1.0);
    prog.add_linear_le(std::move(gb_hi), LinExpr(m2 * (1.0 + 1e-6)));
    LinExpr gb_lo;
    gb_lo.add(exprs[i].gb, -1.0);
    prog.add_linear_le(std::move(gb_lo), LinExpr(1e-6 * m2));

    // Distance-product slacks, same split as scheme I.
    const double d_k2r = sq(s.d_k_ref), d_b2r = sq(s.d_b_ref), d_e2r = sq(s.d_e_ref);
    {
      LinExpr y = LinExpr::var(s.t1).add_constant(-2.0 * H * H);
      std::vector<LinExpr> u;
      u.push_back(qx_expr(s.n).add_constant(-s.w_k.x));
      u.push_back(qy_expr(s.n).add_constant(-s.w_k.y));
      u.push_back(qx_expr(s.n).add_constant(-cfg.bs_pos.x));
      u.push_back(qy_expr(s.n).add_constant(-cfg.bs_pos.y));
      prog.add_quad_epi(std::move(u), std::move(y));
      prog.add_quad_epi({LinExpr::var(s.t1)}, LinExpr::var(s.t2));

      LinExpr f(0.5 * (-(sq(d_k2r) + sq(d_b2r))));
      f.add(s.t2, 0.5);
      const Vec2 gk = (s.q_ref - s.w_k) * (-2.0 * d_k2r);
      const Vec2 gb_grad = (s.q_ref - cfg.bs_pos) * (-2.0 * d_b2r);
      f.add(qx_expr(s.n), gk.x + gb_grad.x);
      f.add(qy_expr(s.n), gk.y + gb_grad.y);
      f.add_constant(-(gk.x + gb_grad.x) * s.q_ref.x - (gk.y + gb_grad.y) * s.q_ref.y);
      prog.add_pow_hypo(std::move(f), LinExpr::var(s.z), 2.0 / alpha);
    }
    {
      std::vector<LinExpr> uk;
      uk.push_back(qx_expr(s.n).add_constant(-s.w_k.x));
      uk.push_back(qy_expr(s.n).add_constant(-s.w_k.y));
      prog.add_quad_epi(std::move(uk), LinExpr::var(s.ud_k).add_constant(-H * H));
      prog.add_quad_epi({LinExpr::var(s.ud_k)}, LinExpr::var(s.uq_k));
      std::vector<LinExpr> ue;
      ue.push_back(qx_expr(s.n).add_constant(-cfg.eve_pos.x));
      ue.push_back(qy_expr(s.n).add_constant(-cfg.eve_pos.y));
      prog.add_quad_epi(std::move(ue), LinExpr::var(s.ud_e).add_constant(-H * H));
      prog.add_quad_epi({LinExpr::var(s.ud_e)}, LinExpr::var(s.uq_e));

      const double s_ke = d_k2r + d_e2r;
      const double e = 2.0 / alpha;
      const double base = std::pow(s.v_ref, e);
      LinExpr lhs(base - e * base);
      lhs.add(s.v, e * base / s.v_ref);
      lhs.add(s.uq_k, 0.5);
      lhs.add(s.uq_e, 0.5);
      const Vec2 grad_dir = 2.0 * s.q_ref - s.w_k - cfg.eve_pos;
      LinExpr rhs(0.5 * sq(s_ke) - 2.0 * s_ke * grad_dir.dot(s.q_ref));
      rhs.add(qx_expr(s.n), 2.0 * s_ke * grad_dir.x);
      rhs.add(qy_expr(s.n), 2.0 * s_ke * grad_dir.y);
      prog.add_linear_le(std::move(lhs), std::move(rhs));
    }

    // Per-slot trust region keeps the frozen-distance AoA model honest.
    if (s.n >= 1 && s.n < N) {
      std::vector<LinExpr> u;
      u.push_back(qx_expr(s.n).add_constant(-s.q_ref.x));
      u.push_back(qy_expr(s.n).add_constant(-s.q_ref.y));
      prog.add_soc(std::move(u), LinExpr(trust * (1.0 + 1e-9) + 1e-12 * coord_scale));
    }
  }

  const double s_max_eff = s_max * (1.0 + 1e-9) + 1e-12 * coord_scale;
  for (int n = 1; n <= N; ++n) {
    std::vector<LinExpr> u;
    LinExpr dx = qx_expr(n);
    dx.add(qx_expr(n - 1), -1.0);
    LinExpr dy = qy_expr(n);
    dy.add(qy_expr(n - 1), -1.0);
    u.push_back(std::move(dx));
    u.push_back(std::move(dy));
    prog.add_soc(std::move(u), LinExpr(s_max_eff));
  }

  prog.maximize(LinExpr::var(zeta_var));
  out.report = prog.solve();
  out.solver_ok = out.report.status != SolveStatus::numerical_failure;
  if (!out.solver_ok) return out;

  for (int n = 1; n < N; ++n) {
    out.trajectory.at(n).x = out.report.x[qx[static_cast<size_t>(n)]];
    out.trajectory.at(n).y = out.report.x[qy[static_cast<size_t>(n)]];
  }
  out.trajectory.at(0) = Q_ref.at(0);
  out.trajectory.at(N) = Q_ref.at(0);
  for (const auto& s : slots)
    for (int m = 0; m < M; ++m)
      out.phases.at(m, s.n) = wrap_angle(out.report.x[s.theta[static_cast<size_t>(m)]]);
  return out;
}

}  // namespace

JointRunResult optimize_trajectory_s2(const Eigen::MatrixXd& assoc_binary,
                                      const Eigen::MatrixXd& power, const Trajectory& Q_init,
                                      const PhaseSchedule& theta_init, const ScenarioConfig& cfg) {
  JointRunResult out;
  out.trajectory = Q_init;
  out.phases = theta_init;

  Allocation alloc(cfg.num_users, cfg.num_slots);
  for (int n = 1; n <= cfg.num_slots; ++n)
    for (int k = 0; k < cfg.num_users; ++k) {
      alloc.a(k, n) = assoc_binary(k, n - 1);
      alloc.p(k, n) = power(k, n - 1);
    }

  double zeta_inc = evaluate_detailed(cfg, out.trajectory, out.phases, alloc).zeta_exact;

  for (int i = 0; i < cfg.sca_cap; ++i) {
    JointStep step =
        solve_joint_subproblem(assoc_binary, power, out.trajectory, out.phases, cfg);
    ++out.sca_iterations;
    if (!step.solver_ok) {
      out.solver_failure = true;
      break;
    }
    const double zeta_cand =
        evaluate_detailed(cfg, step.trajectory, step.phases, alloc).zeta_exact;
    if (zeta_cand < zeta_inc) break;  // approximation left its validity region

    const double rel = (zeta_cand - zeta_inc) / std::max(std::abs(zeta_cand), 1e-300);
    out.trajectory = step.trajectory;
    out.phases = step.phases;
    zeta_inc = zeta_cand;
    if (rel <= cfg.sca_tol) break;
  }
  return out;
}

}  // namespace uavris
