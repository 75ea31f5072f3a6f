#include "uavris/trajectory_s1.hpp"

#include <algorithm>
#include <cmath>
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

std::vector<double> aligned_phases(const Vec2& q, const Vec2& user, const Vec2& bs,
                                   const ScenarioConfig& cfg) {
  const double phi_k = aoa_cosine(q, user, cfg.altitude_m);
  const double phi_b = aoa_cosine(q, bs, cfg.altitude_m);
  const double step = kTwoPi * cfg.element_spacing_ratio * (phi_k - phi_b);
  std::vector<double> theta(static_cast<size_t>(cfg.ris_elements));
  for (int m = 0; m < cfg.ris_elements; ++m)
    theta[static_cast<size_t>(m)] = wrap_angle(static_cast<double>(m) * step);
  return theta;
}

double rate_in_slack(double z, double B) { return std::log1p(B / z) / kLn2; }

RateSlackTangent linearize_rate_slack(double z_ref, double B) {
  RateSlackTangent t;
  t.slope = -B / (z_ref * (z_ref + B) * kLn2);
  t.intercept = rate_in_slack(z_ref, B) - t.slope * z_ref;
  return t;
}

double product_upper_bound_f(const Vec2& q, const Vec2& q_ref, const Vec2& w_k, const Vec2& w_b,
                             double altitude) {
  const double dk2 = (q - w_k).norm2() + altitude * altitude;
  const double db2 = (q - w_b).norm2() + altitude * altitude;
  const double dk2r = (q_ref - w_k).norm2() + altitude * altitude;
  const double db2r = (q_ref - w_b).norm2() + altitude * altitude;
  const Vec2 dq = q - q_ref;
  return 0.5 * (sq(dk2 + db2) - (sq(dk2r) + sq(db2r)))
         - 2.0 * dk2r * (q_ref - w_k).dot(dq)
         - 2.0 * db2r * (q_ref - w_b).dot(dq);
}

double product_lower_bound_g(const Vec2& q, const Vec2& q_ref, const Vec2& w_k, const Vec2& w_e,
                             double altitude) {
  const double dk2 = (q - w_k).norm2() + altitude * altitude;
  const double de2 = (q - w_e).norm2() + altitude * altitude;
  const double dk2r = (q_ref - w_k).norm2() + altitude * altitude;
  const double de2r = (q_ref - w_e).norm2() + altitude * altitude;
  const Vec2 dq = q - q_ref;
  const Vec2 grad_dir = 2.0 * q_ref - w_k - w_e;
  return 0.5 * (sq(dk2r + de2r) - (sq(dk2) + sq(de2)))
         + 2.0 * (dk2r + de2r) * grad_dir.dot(dq);
}

double concave_tangent_h(double v, double v_ref, double alpha) {
  const double e = 2.0 / alpha;
  const double base = std::pow(v_ref, e);
  return base + e * base / v_ref * (v - v_ref);
}

PhaseSchedule realign_phases(const Trajectory& traj, const Eigen::MatrixXd& assoc_binary,
                             const PhaseSchedule& previous, const ScenarioConfig& cfg) {
  PhaseSchedule out = previous;
  for (int n = 1; n <= cfg.num_slots; ++n) {
    int served = -1;
    for (int k = 0; k < cfg.num_users; ++k)
      if (assoc_binary(k, n - 1) > 0.5) {
        served = k;
        break;
      }
    if (served < 0) continue;
    const auto theta =
        aligned_phases(traj.at(n), cfg.user_pos[static_cast<size_t>(served)], cfg.bs_pos, cfg);
    std::copy(theta.begin(), theta.end(), out.column(n));
  }
  return out;
}

TrajectoryStep solve_trajectory_subproblem(const Eigen::MatrixXd& assoc_binary,
                                           const Eigen::MatrixXd& power,
                                           const Trajectory& Q_ref, const ScenarioConfig& cfg) {
  const int K = cfg.num_users;
  const int N = cfg.num_slots;
  const double H = cfg.altitude_m;
  const double alpha = cfg.pathloss_exp;
  const double s_max = cfg.s_max();

  TrajectoryStep out;
  out.trajectory = Q_ref;
  out.Z = Eigen::MatrixXd::Zero(K, N);
  out.V = Eigen::MatrixXd::Zero(K, N);

  if (s_max <= 0.0) {  // nothing movable
    out.solver_ok = true;
    out.report.status = SolveStatus::optimal;
    return out;
  }

  struct Slot {
    int n, k;
    double B;
    double z_ref, v_ref;
    Vec2 q_ref, w_k;
    RateSlackTangent r_hat;
    int z = -1, v = -1, e = -1, t1 = -1, t2 = -1, ud_k = -1, uq_k = -1, ud_e = -1, uq_e = -1;
  };
  std::vector<Slot> slots;
  const double M = static_cast<double>(cfg.ris_elements);
  const double z_lb = std::pow(H, 2.0 * alpha);
  const double v_lb = z_lb * 1e-6;
  double rate_scale = 1e-12;

  for (int n = 1; n <= N; ++n) {
    for (int k = 0; k < K; ++k) {
      if (assoc_binary(k, n - 1) < 0.5) continue;
      const double p = power(k, n - 1);
      if (p <= 0.0) continue;
      Slot s;
      s.n = n;
      s.k = k;
      s.q_ref = Q_ref.at(n);
      s.w_k = cfg.user_pos[static_cast<size_t>(k)];
      s.B = p * cfg.ref_gain * cfg.ref_gain * M * M / cfg.noise_w;
      const double d_k = distance(s.q_ref, s.w_k, H);
      const double d_b = distance(s.q_ref, cfg.bs_pos, H);
      const double d_e = distance(s.q_ref, cfg.eve_pos, H);
      s.z_ref = std::pow(d_k * d_b, alpha);
      s.v_ref = std::max(std::pow(d_k * d_e, alpha), v_lb * (1.0 + 1e-6));
      const double margin = rate_in_slack(s.z_ref, s.B) - rate_in_slack(s.v_ref, s.B);
      if (margin <= 0.0) continue;  // clamped pair adds nothing this step
      s.r_hat = linearize_rate_slack(s.z_ref, s.B);
      rate_scale = std::max(rate_scale, rate_in_slack(s.z_ref, s.B));
      slots.push_back(s);
    }
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
  // q[1..N-1] are free; the endpoints stay pinned to the loop start.
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
    const double d_k2 = sq(distance(s.q_ref, s.w_k, H));
    const double d_b2 = sq(distance(s.q_ref, cfg.bs_pos, H));
    const double d_e2 = sq(distance(s.q_ref, cfg.eve_pos, H));
    const double s_kb = d_k2 + d_b2;
    s.z = prog.add_variable(s.z_ref * (1.0 + 1e-5), z_lb * (1.0 - 1e-9),
                            std::numeric_limits<double>::infinity(), s.z_ref);
    s.v = prog.add_variable(s.v_ref * (1.0 - 3e-5), v_lb,
                            std::numeric_limits<double>::infinity(), s.v_ref);
    const double c_warm = rate_in_slack(s.v_ref * (1.0 - 3e-5), s.B);
    s.e = prog.add_free_variable(c_warm + std::max(1e-6 * c_warm, 1e-18),
                                 std::max(c_warm, rate_scale * 1e-3));
    s.t1 = prog.add_free_variable(s_kb * (1.0 + 1e-8), s_kb);
    s.t2 = prog.add_free_variable(sq(s_kb * (1.0 + 1e-8)) * (1.0 + 1e-8), sq(s_kb));
    s.ud_k = prog.add_free_variable(d_k2 * (1.0 + 1e-9), d_k2);
    s.uq_k = prog.add_free_variable(sq(d_k2 * (1.0 + 1e-9)) * (1.0 + 1e-9), sq(d_k2));
    s.ud_e = prog.add_free_variable(d_e2 * (1.0 + 1e-9), d_e2);
    s.uq_e = prog.add_free_variable(sq(d_e2 * (1.0 + 1e-9)) * (1.0 + 1e-9), sq(d_e2));
  }

  std::vector<std::vector<const Slot*>> by_user(static_cast<size_t>(K));
  for (const auto& s : slots) by_user[static_cast<size_t>(s.k)].push_back(&s);

  double warm_zeta = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    if (by_user[static_cast<size_t>(k)].empty()) continue;
    double avg = 0.0;
    for (const Slot* s : by_user[static_cast<size_t>(k)])
      avg += (s->r_hat.at(s->z_ref) - rate_in_slack(s->v_ref, s->B)) / N;
    warm_zeta = std::min(warm_zeta, avg);
  }
  const int zeta_var =
      prog.add_free_variable(warm_zeta - 0.05 * rate_scale - 1e-15, rate_scale);

  for (int k = 0; k < K; ++k) {
    const auto& list = by_user[static_cast<size_t>(k)];
    if (list.empty()) continue;
    LinExpr rhs;
    for (const Slot* s : list) {
      rhs.add(s->z, s->r_hat.slope / N);
      rhs.add_constant(s->r_hat.intercept / N);
      rhs.add(s->e, -1.0 / N);
    }
    prog.add_linear_le(LinExpr::var(zeta_var), rhs);
  }

  for (const auto& s : slots) {
    prog.add_logfrac_epi(LinExpr::var(s.e), s.B, LinExpr::var(s.v));

    const double d_k2r = sq(distance(s.q_ref, s.w_k, H));
    const double d_b2r = sq(distance(s.q_ref, cfg.bs_pos, H));
    const double d_e2r = sq(distance(s.q_ref, cfg.eve_pos, H));

    // t1 >= d_k^2 + d_b^2, t2 >= t1^2.
    {
      LinExpr y = LinExpr::var(s.t1).add_constant(-2.0 * H * H);
      std::vector<LinExpr> u;
      u.push_back(qx_expr(s.n).add_constant(-s.w_k.x));
      u.push_back(qy_expr(s.n).add_constant(-s.w_k.y));
      u.push_back(qx_expr(s.n).add_constant(-cfg.bs_pos.x));
      u.push_back(qy_expr(s.n).add_constant(-cfg.bs_pos.y));
      prog.add_quad_epi(std::move(u), std::move(y));
      prog.add_quad_epi({LinExpr::var(s.t1)}, LinExpr::var(s.t2));
    }

    // Majorant of d_k^2 d_b^2 must stay below z^(2/alpha).
    {
      LinExpr f(0.5 * (-(sq(d_k2r) + sq(d_b2r))));
      f.add(s.t2, 0.5);
      const Vec2 gk = (s.q_ref - s.w_k) * (-2.0 * d_k2r);
      const Vec2 gb = (s.q_ref - cfg.bs_pos) * (-2.0 * d_b2r);
      f.add(qx_expr(s.n), gk.x + gb.x);
      f.add(qy_expr(s.n), gk.y + gb.y);
      f.add_constant(-(gk.x + gb.x) * s.q_ref.x - (gk.y + gb.y) * s.q_ref.y);
      prog.add_pow_hypo(std::move(f), LinExpr::var(s.z), 2.0 / alpha);
    }

    // Quartic upper slacks for the minorant of d_k^2 d_e^2.
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

      // h(v) + (uq_k + uq_e)/2 <= tangent of the squared-sum term.
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
  if (!out.solver_ok) return out;  // reference trajectory stays in place

  for (int n = 1; n < N; ++n) {
    out.trajectory.at(n).x = out.report.x[qx[static_cast<size_t>(n)]];
    out.trajectory.at(n).y = out.report.x[qy[static_cast<size_t>(n)]];
  }
  out.trajectory.at(0) = Q_ref.at(0);
  out.trajectory.at(N) = Q_ref.at(0);
  for (const auto& s : slots) {
    out.Z(s.k, s.n - 1) = out.report.x[s.z];
    out.V(s.k, s.n - 1) = out.report.x[s.v];
  }
  out.zeta_surrogate = out.report.x[zeta_var];
  return out;
}

TrajectoryRunResult optimize_trajectory_s1(const Eigen::MatrixXd& assoc_binary,
                                           const Eigen::MatrixXd& power,
                                           const Trajectory& Q_init,
                                           const PhaseSchedule& theta_init,
                                           const ScenarioConfig& cfg) {
  TrajectoryRunResult out;
  out.trajectory = Q_init;
  out.phases = realign_phases(Q_init, assoc_binary, theta_init, cfg);

  Allocation alloc(cfg.num_users, cfg.num_slots);
  for (int n = 1; n <= cfg.num_slots; ++n)
    for (int k = 0; k < cfg.num_users; ++k) {
      alloc.a(k, n) = assoc_binary(k, n - 1);
      alloc.p(k, n) = power(k, n - 1);
    }

  double zeta_inc =
      evaluate_detailed(cfg, out.trajectory, out.phases, alloc).zeta_exact;

  for (int i = 0; i < cfg.sca_cap; ++i) {
    TrajectoryStep step = solve_trajectory_subproblem(assoc_binary, power, out.trajectory, cfg);
    ++out.sca_iterations;
    if (!step.solver_ok) {
      out.solver_failure = true;
      break;
    }
    PhaseSchedule cand_phases = realign_phases(step.trajectory, assoc_binary, out.phases, cfg);
    const double zeta_cand =
        evaluate_detailed(cfg, step.trajectory, cand_phases, alloc).zeta_exact;
    if (zeta_cand < zeta_inc) break;  // conservative model stopped paying off

    const double rel =
        (zeta_cand - zeta_inc) / std::max(std::abs(zeta_cand), 1e-300);
    out.trajectory = step.trajectory;
    out.phases = cand_phases;
    zeta_inc = zeta_cand;
    if (rel <= cfg.sca_tol) break;
  }
  return out;
}

}  // namespace uavris
