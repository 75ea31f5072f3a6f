#include "uavris/baseline_af.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "uavris/assoc.hpp"
#include "uavris/channel.hpp"
#include "uavris/convex.hpp"

namespace uavris {

namespace {
const double kLn2 = std::numbers::ln2;

double half_log2_1p(double x) { return 0.5 * std::log1p(x) / kLn2; }

double end_to_end_snr(double g1, double g2) { return g1 * g2 / (g1 + g2 + 1.0); }

int served_user(const Eigen::MatrixXd& assoc, int n) {
  for (int k = 0; k < assoc.rows(); ++k)
    if (assoc(k, n - 1) > 0.5) return k;
  return -1;
}
}  // namespace

double af_rate(double p_user, double d_first, double d_second, const ScenarioConfig& cfg) {
  const double g1 =
      p_user * cfg.ref_gain / (cfg.noise_w * std::pow(d_first, cfg.pathloss_exp));
  const double g2 = cfg.af_relay_power_w * cfg.ref_gain /
                    (cfg.noise_w * std::pow(d_second, cfg.pathloss_exp));
  return half_log2_1p(end_to_end_snr(g1, g2));
}

Eigen::MatrixXd af_association_rate_matrix(const ScenarioConfig& cfg, const Trajectory& traj,
                                           const Allocation& alloc) {
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(cfg.num_users, cfg.num_slots);
  for (int n = 1; n <= cfg.num_slots; ++n) {
    const Vec2 q = traj.at(n);
    const double d_b = distance(q, cfg.bs_pos, cfg.altitude_m);
    const double d_e = distance(q, cfg.eve_pos, cfg.altitude_m);
    for (int k = 0; k < cfg.num_users; ++k) {
      double p = alloc.p(k, n);
      if (p <= 0.0) p = cfg.max_power(k);
      const double d_k = distance(q, cfg.user_pos[static_cast<size_t>(k)], cfg.altitude_m);
      R(k, n - 1) =
          std::max(af_rate(p, d_k, d_b, cfg) - af_rate(p, d_k, d_e, cfg), 0.0);
    }
  }
  return R;
}

AfReport af_evaluate(const ScenarioConfig& cfg, const Trajectory& traj,
                     const Eigen::MatrixXd& assoc_binary, const Eigen::MatrixXd& power) {
  AfReport rep;
  rep.secrecy = Eigen::MatrixXd::Zero(cfg.num_users, cfg.num_slots);
  int active_slots = 0;
  double power_sum = 0.0;
  for (int n = 1; n <= cfg.num_slots; ++n) {
    const int k = served_user(assoc_binary, n);
    if (k < 0) continue;
    ++active_slots;  // the relay spends P_UAV whenever a slot is served
    const double p = power(k, n - 1);
    power_sum += p;
    const Vec2 q = traj.at(n);
    const double d_k = distance(q, cfg.user_pos[static_cast<size_t>(k)], cfg.altitude_m);
    const double d_b = distance(q, cfg.bs_pos, cfg.altitude_m);
    const double d_e = distance(q, cfg.eve_pos, cfg.altitude_m);
    rep.secrecy(k, n - 1) =
        std::max(af_rate(p, d_k, d_b, cfg) - af_rate(p, d_k, d_e, cfg), 0.0);
  }
  rep.zeta = min_avg_secrecy(rep.secrecy);
  rep.gamma =
      rep.zeta / (power_sum + cfg.af_relay_power_w * active_slots + cfg.circuit_power_w);
  return rep;
}

namespace {

struct AfPowerResult {
  Eigen::MatrixXd power;
  int dinkelbach_iterations = 0;
  int sca_iterations = 0;
  bool solver_failure = false;
};

// Parametric convex step of the relay power control. The legitimate rate is
// lower-bounded by keeping its first log exact and linearizing the coupling
// log; the eavesdropper rate is upper-bounded by its full tangent.
Eigen::MatrixXd solve_af_power_step(double eta, const Eigen::MatrixXd& assoc_binary,
                                    const Trajectory& traj, const ScenarioConfig& cfg,
                                    const Eigen::MatrixXd& P_ref, bool* ok) {
  const int K = cfg.num_users;
  const int N = cfg.num_slots;
  *ok = true;

  struct Slot {
    int n, k;
    double b1;           // gamma1 = b1 * p
    double g2, ge;       // relay-side SNRs toward BS and eavesdropper
    double p_ref;
    double r_const, r_slope;  // affine part of the rate lower bound
    double c_const, c_slope;  // tangent upper bound of the eavesdropper rate
    int p_var = -1, t_var = -1;
  };
  std::vector<Slot> slots;
  double rate_scale = 1e-9;
  int active_slots = 0;

  for (int n = 1; n <= N; ++n) {
    const int k = served_user(assoc_binary, n);
    if (k < 0) continue;
    ++active_slots;
    Slot s;
    s.n = n;
    s.k = k;
    const Vec2 q = traj.at(n);
    const double d_k = distance(q, cfg.user_pos[static_cast<size_t>(k)], cfg.altitude_m);
    const double d_b = distance(q, cfg.bs_pos, cfg.altitude_m);
    const double d_e = distance(q, cfg.eve_pos, cfg.altitude_m);
    s.b1 = cfg.ref_gain / (cfg.noise_w * std::pow(d_k, cfg.pathloss_exp));
    s.g2 = cfg.af_relay_power_w * cfg.ref_gain /
           (cfg.noise_w * std::pow(d_b, cfg.pathloss_exp));
    s.ge = cfg.af_relay_power_w * cfg.ref_gain /
           (cfg.noise_w * std::pow(d_e, cfg.pathloss_exp));
    s.p_ref = std::clamp(P_ref(k, n - 1), 0.0, cfg.max_power(k));

    const double r_ref = af_rate(s.p_ref, d_k, d_b, cfg);
    const double c_ref = af_rate(s.p_ref, d_k, d_e, cfg);
    if (r_ref - c_ref < 0.0) continue;  // clamped: keep the slot dark this step

    const double g1 = s.b1 * s.p_ref;
    // -0.5 log2(1 + g1 + g2) tangent (a lower bound of the convex negative term)
    {
      const double v = -half_log2_1p(g1 + s.g2);
      const double slope = -0.5 * s.b1 / ((1.0 + g1 + s.g2) * kLn2);
      s.r_slope = slope;
      s.r_const = half_log2_1p(s.g2) + v - slope * s.p_ref;
    }
    // full tangent of the concave eavesdropper rate (a global upper bound)
    {
      const double slope =
          0.5 * s.b1 / kLn2 * (1.0 / (1.0 + g1) - 1.0 / (1.0 + g1 + s.ge));
      s.c_slope = slope;
      s.c_const = c_ref - slope * s.p_ref;
    }
    rate_scale = std::max(rate_scale, std::max(r_ref, 1e-9));
    slots.push_back(s);
  }

  Eigen::MatrixXd P_out = Eigen::MatrixXd::Zero(K, N);
  if (slots.empty()) return P_out;

  ConvexProgram prog;
  for (auto& s : slots) {
    s.p_var = prog.add_variable(s.p_ref, 0.0, cfg.max_power(s.k), cfg.max_power(s.k));
    const double t_warm = std::log1p(s.b1 * s.p_ref) / kLn2;
    s.t_var = prog.add_free_variable(t_warm * (1.0 - 1e-9) - 1e-9 * rate_scale,
                                     std::max(t_warm, rate_scale));
  }
  std::vector<std::vector<const Slot*>> by_user(static_cast<size_t>(K));
  for (const auto& s : slots) by_user[static_cast<size_t>(s.k)].push_back(&s);

  double warm_zeta = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    if (by_user[static_cast<size_t>(k)].empty()) continue;
    double avg = 0.0;
    for (const Slot* s : by_user[static_cast<size_t>(k)]) {
      const double r = 0.5 * std::log1p(s->b1 * s->p_ref) / kLn2 + s->r_const +
                       s->r_slope * s->p_ref;
      avg += (r - (s->c_const + s->c_slope * s->p_ref)) / N;
    }
    warm_zeta = std::min(warm_zeta, avg);
  }
  const int zeta_var =
      prog.add_free_variable(warm_zeta - 0.05 * rate_scale - 1e-12, rate_scale);

  for (auto& s : slots)
    prog.add_log1p_hypo(LinExpr::var(s.t_var), LinExpr::var(s.p_var, s.b1));

  for (int k = 0; k < K; ++k) {
    const auto& list = by_user[static_cast<size_t>(k)];
    if (list.empty()) continue;
    LinExpr lhs = LinExpr::var(zeta_var);
    LinExpr rhs;
    for (const Slot* s : list) {
      rhs.add(s->t_var, 0.5 / N);
      rhs.add_constant((s->r_const - s->c_const) / N);
      rhs.add(s->p_var, (s->r_slope - s->c_slope) / N);
    }
    prog.add_linear_le(lhs, rhs);
  }

  LinExpr obj = LinExpr::var(zeta_var);
  for (const auto& s : slots) obj.add(s.p_var, -eta);
  obj.add_constant(-eta * (cfg.circuit_power_w + cfg.af_relay_power_w * active_slots));
  prog.maximize(obj);

  SolveReport rep = prog.solve();
  if (rep.status == SolveStatus::numerical_failure) {
    *ok = false;
    return P_out;
  }
  for (const auto& s : slots) {
    double v = std::clamp(rep.x[s.p_var], 0.0, cfg.max_power(s.k));
    if (v < 1e-12 * std::max(1.0, cfg.max_power(s.k))) v = 0.0;
    P_out(s.k, s.n - 1) = v;
  }
  return P_out;
}

AfPowerResult optimize_af_power(const Eigen::MatrixXd& assoc_binary, const Trajectory& traj,
                                const Eigen::MatrixXd& P_init, const ScenarioConfig& cfg) {
  AfPowerResult out;
  Eigen::MatrixXd P_inc = P_init;
  for (int n = 1; n <= cfg.num_slots; ++n)
    for (int k = 0; k < cfg.num_users; ++k)
      if (served_user(assoc_binary, n) != k) P_inc(k, n - 1) = 0.0;

  AfReport inc = af_evaluate(cfg, traj, assoc_binary, P_inc);
  double eta = inc.gamma;

  for (int t = 0; t < cfg.dinkelbach_cap; ++t) {
    ++out.dinkelbach_iterations;
    for (int s = 0; s < cfg.sca_cap; ++s) {
      ++out.sca_iterations;
      bool ok = true;
      Eigen::MatrixXd P_cand = solve_af_power_step(eta, assoc_binary, traj, cfg, P_inc, &ok);
      if (!ok) {
        out.solver_failure = true;
        break;
      }
      AfReport cand = af_evaluate(cfg, traj, assoc_binary, P_cand);
      if (cand.gamma >= inc.gamma) {
        const bool settled =
            std::abs(cand.zeta - inc.zeta) <=
            cfg.sca_tol * std::max(std::abs(cand.zeta), 1e-300);
        P_inc = P_cand;
        inc = cand;
        if (settled) break;
      } else {
        break;
      }
    }
    const double eta_next = inc.gamma;
    const bool stable =
        std::abs(eta_next - eta) <= cfg.dinkelbach_tol * std::max(eta_next, 1e-300);
    eta = eta_next;
    if (stable || out.solver_failure) break;
  }
  out.power = P_inc;
  return out;
}

// Deterministic projected local search over slot positions; every accepted
// move strictly improves the exact objective and preserves feasibility.
Trajectory improve_af_trajectory(const Eigen::MatrixXd& assoc_binary,
                                 const Eigen::MatrixXd& power, const Trajectory& Q_init,
                                 const ScenarioConfig& cfg, int* iterations) {
  Trajectory traj = Q_init;
  const double s_max = cfg.s_max();
  if (s_max <= 0.0) return traj;
  double zeta_inc = af_evaluate(cfg, traj, assoc_binary, power).zeta;

  const Vec2 dirs[8] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                        {0.7071067811865476, 0.7071067811865476},
                        {-0.7071067811865476, 0.7071067811865476},
                        {0.7071067811865476, -0.7071067811865476},
                        {-0.7071067811865476, -0.7071067811865476}};
  const double steps[2] = {0.25 * s_max, 0.0625 * s_max};

  for (int sweep = 0; sweep < 6; ++sweep) {
    ++*iterations;
    bool improved = false;
    for (int n = 1; n < cfg.num_slots; ++n) {
      Vec2 best_pos = traj.at(n);
      double best_zeta = zeta_inc;
      for (const Vec2& dir : dirs) {
        for (double step : steps) {
          const Vec2 cand = traj.at(n) + dir * step;
          if ((cand - traj.at(n - 1)).norm() > s_max) continue;
          if ((traj.at(n + 1) - cand).norm() > s_max) continue;
          const Vec2 saved = traj.at(n);
          traj.at(n) = cand;
          const double z = af_evaluate(cfg, traj, assoc_binary, power).zeta;
          traj.at(n) = saved;
          if (z > best_zeta) {
            best_zeta = z;
            best_pos = cand;
          }
        }
      }
      if (best_zeta > zeta_inc) {
        traj.at(n) = best_pos;
        zeta_inc = best_zeta;
        improved = true;
      }
    }
    if (!improved) break;
  }
  return traj;
}

Allocation to_allocation(const Eigen::MatrixXd& assoc, const Eigen::MatrixXd& power) {
  Allocation alloc(static_cast<int>(assoc.rows()), static_cast<int>(assoc.cols()));
  for (int n = 1; n <= alloc.num_slots; ++n)
    for (int k = 0; k < alloc.num_users; ++k) {
      alloc.a(k, n) = assoc(k, n - 1);
      alloc.p(k, n) = power(k, n - 1);
    }
  return alloc;
}

}  // namespace

RunResult run_baseline(const ScenarioConfig& cfg) {
  cfg.validate();
  if (cfg.af_relay_power_w <= 0.0)
    throw ConfigError("relay baseline requires P_uav > 0");
  const int K = cfg.num_users;
  const int N = cfg.num_slots;

  Trajectory traj = initial_trajectory(cfg);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K, N);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(K, N);
  for (int k = 0; k < K; ++k) P.row(k).setConstant(cfg.max_power(k));

  RunResult out;
  double gamma_inc = 0.0;

  for (int t = 1; t <= cfg.outer_cap; ++t) {
    const auto tic = std::chrono::steady_clock::now();
    IterationRecord rec;
    rec.iteration = t;

    try {
      const Eigen::MatrixXd R = af_association_rate_matrix(cfg, traj, to_allocation(A, P));
      AssociationLp lp = solve_association_lp(R);
      rec.assoc_solver_iters = lp.report.newton_iterations;
      Eigen::MatrixXd A_new = round_association(lp.fractional);
      Eigen::MatrixXd P_new = P;
      for (int n = 0; n < N; ++n)
        for (int k = 0; k < K; ++k) {
          if (A_new(k, n) < 0.5)
            P_new(k, n) = 0.0;
          else if (P_new(k, n) <= 0.0)
            P_new(k, n) = cfg.max_power(k);
        }
      const double gamma_cand = af_evaluate(cfg, traj, A_new, P_new).gamma;
      if (gamma_cand >= gamma_inc) {
        A = A_new;
        P = P_new;
        gamma_inc = gamma_cand;
      }
    } catch (const Error&) {
      ++rec.solver_failures;
    }

    try {
      AfPowerResult pr = optimize_af_power(A, traj, P, cfg);
      rec.dinkelbach_iters = pr.dinkelbach_iterations;
      rec.power_sca_iters = pr.sca_iterations;
      if (pr.solver_failure) ++rec.solver_failures;
      const double gamma_cand = af_evaluate(cfg, traj, A, pr.power).gamma;
      if (gamma_cand >= gamma_inc) {
        P = pr.power;
        gamma_inc = gamma_cand;
      }
    } catch (const Error&) {
      ++rec.solver_failures;
    }

    {
      Trajectory cand = improve_af_trajectory(A, P, traj, cfg, &rec.trajectory_sca_iters);
      const double gamma_cand = af_evaluate(cfg, cand, A, P).gamma;
      if (gamma_cand >= gamma_inc) {
        traj = cand;
        gamma_inc = gamma_cand;
      } else {
        rec.reverted = true;
      }
    }

    const AfReport rep = af_evaluate(cfg, traj, A, P);
    gamma_inc = rep.gamma;
    rec.gamma = rep.gamma;
    rec.zeta = rep.zeta;
    rec.zeta_bound = rep.zeta;  // no phase model: both columns coincide
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - tic)
                      .count();
    out.trace.records.push_back(rec);

    if (t >= 2) {
      const double prev = out.trace.records[static_cast<size_t>(t) - 2].gamma;
      const double delta = std::abs(rec.gamma - prev);
      if (delta <= cfg.outer_tol * std::max(std::abs(rec.gamma), 1e-300) ||
          (rec.gamma == 0.0 && prev == 0.0)) {
        out.trace.converged = true;
        out.trace.iterations_to_converge = t;
        break;
      }
    }
  }
  if (!out.trace.converged)
    out.trace.iterations_to_converge = static_cast<int>(out.trace.records.size());

  out.state.allocation = to_allocation(A, P);
  out.state.trajectory = traj;
  out.state.phases = PhaseSchedule(cfg.ris_elements, cfg.num_slots);
  const AfReport rep = af_evaluate(cfg, traj, A, P);
  out.state.zeta = rep.zeta;
  out.state.gamma = rep.gamma;
  return out;
}

}  // namespace uavris
