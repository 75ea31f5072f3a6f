#include "uavris/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "uavris/channel.hpp"

namespace uavris {

namespace {
const double kLn2 = std::numbers::ln2;

Allocation make_allocation(const Eigen::MatrixXd& assoc, const Eigen::MatrixXd& power) {
  Allocation alloc(static_cast<int>(assoc.rows()), static_cast<int>(assoc.cols()));
  for (int n = 1; n <= alloc.num_slots; ++n)
    for (int k = 0; k < alloc.num_users; ++k) {
      alloc.a(k, n) = assoc(k, n - 1);
      alloc.p(k, n) = power(k, n - 1);
    }
  return alloc;
}

void snap_bounds(Eigen::MatrixXd& P, const ScenarioConfig& cfg) {
  for (int n = 0; n < P.cols(); ++n)
    for (int k = 0; k < P.rows(); ++k) {
      const double cap = cfg.max_power(k);
      double v = std::clamp(P(k, n), 0.0, cap);
      if (v < 1e-12 * std::max(1.0, cap)) v = 0.0;
      if (cap - v < 1e-12 * std::max(1.0, cap)) v = cap;
      P(k, n) = v;
    }
}

}  // namespace

LinearizedEveRate linearize_eve_rate(double p_ref, double gain_eve, double noise) {
  LinearizedEveRate lin;
  const double denom = noise + p_ref * gain_eve;
  lin.slope = gain_eve / (kLn2 * denom);
  lin.intercept = std::log1p(p_ref * gain_eve / noise) / kLn2 - lin.slope * p_ref;
  return lin;
}

double dinkelbach_eta(double zeta, const Allocation& alloc, double circuit_power) {
  return zeta / (alloc.total_power() + circuit_power);
}

SlotGains slot_gains(const ScenarioConfig& cfg, const Trajectory& traj,
                     const PhaseSchedule& phases, const Eigen::MatrixXd& assoc_binary) {
  SlotGains g;
  g.served.assign(static_cast<size_t>(cfg.num_slots) + 1, -1);
  g.gain_bs = Eigen::VectorXd::Zero(cfg.num_slots + 1);
  g.gain_eve = Eigen::VectorXd::Zero(cfg.num_slots + 1);
  for (int n = 1; n <= cfg.num_slots; ++n) {
    int served = -1;
    for (int k = 0; k < cfg.num_users; ++k)
      if (assoc_binary(k, n - 1) > 0.5) {
        served = k;
        break;
      }
    g.served[static_cast<size_t>(n)] = served;
    if (served < 0) continue;
    const Vec2 q = traj.at(n);
    std::span<const double> theta(phases.column(n), static_cast<size_t>(phases.num_elements));
    const SteeringChannel g_b = steering_channel(q, cfg.bs_pos, cfg.altitude_m, cfg);
    const SteeringChannel g_k =
        steering_channel(q, cfg.user_pos[static_cast<size_t>(served)], cfg.altitude_m, cfg);
    g.gain_bs[n] = std::norm(cascaded_gain(g_b, theta, g_k));
    g.gain_eve[n] =
        eve_gain_power(true, q, cfg.user_pos[static_cast<size_t>(served)], cfg, theta);
  }
  return g;
}

PowerSubproblemResult solve_power_subproblem(double eta, const Eigen::MatrixXd& assoc_binary,
                                             const SlotGains& gains, const ScenarioConfig& cfg,
                                             const Eigen::MatrixXd& P_ref) {
  const int K = cfg.num_users;
  const int N = cfg.num_slots;
  PowerSubproblemResult out;
  out.power = Eigen::MatrixXd::Zero(K, N);

  struct Slot {
    int n, k;
    double p_ref, gain_bs, gain_eve;
    LinearizedEveRate chat;
    int p_var = -1, t_var = -1;
  };
  std::vector<Slot> slots;
  double rate_scale = 1e-12;
  for (int n = 1; n <= N; ++n) {
    const int k = gains.served[static_cast<size_t>(n)];
    if (k < 0) continue;
    Slot s;
    s.n = n;
    s.k = k;
    s.p_ref = std::clamp(P_ref(k, n - 1), 0.0, cfg.max_power(k));
    s.gain_bs = gains.gain_bs[n];
    s.gain_eve = gains.gain_eve[n];
    const double r = std::log1p(s.p_ref * s.gain_bs / cfg.noise_w) / kLn2;
    const double c = std::log1p(s.p_ref * s.gain_eve / cfg.noise_w) / kLn2;
    if (r - c < 0.0) continue;  // clamped margin: this step keeps the slot dark
    s.chat = linearize_eve_rate(s.p_ref, s.gain_eve, cfg.noise_w);
    rate_scale = std::max(rate_scale, r);
    slots.push_back(s);
  }

  double power_sum_const = cfg.circuit_power_w;  // fixed part of the denominator
  if (slots.empty()) {
    out.zeta = 0.0;
    out.objective = -eta * power_sum_const;
    out.report.status = SolveStatus::optimal;
    return out;
  }

  ConvexProgram prog;
  for (auto& s : slots) {
    s.p_var = prog.add_variable(s.p_ref, 0.0, cfg.max_power(s.k), cfg.max_power(s.k));
    s.t_var = prog.add_free_variable(
        std::log1p(s.p_ref * s.gain_bs / cfg.noise_w) / kLn2 * (1.0 - 1e-9) - 1e-9 * rate_scale,
        rate_scale);
  }

  std::vector<std::vector<const Slot*>> by_user(static_cast<size_t>(K));
  for (const auto& s : slots) by_user[static_cast<size_t>(s.k)].push_back(&s);

  double warm_zeta = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    if (by_user[static_cast<size_t>(k)].empty()) continue;
    double avg = 0.0;
    for (const Slot* s : by_user[static_cast<size_t>(k)]) {
      const double r = std::log1p(s->p_ref * s->gain_bs / cfg.noise_w) / kLn2;
      avg += (r - s->chat.at(s->p_ref)) / N;
    }
    warm_zeta = std::min(warm_zeta, avg);
  }
  const int zeta_var =
      prog.add_free_variable(warm_zeta - 0.05 * rate_scale - 1e-15, rate_scale);

  for (auto& s : slots)
    prog.add_log1p_hypo(LinExpr::var(s.t_var), LinExpr::var(s.p_var, s.gain_bs / cfg.noise_w));

  for (int k = 0; k < K; ++k) {
    const auto& list = by_user[static_cast<size_t>(k)];
    if (list.empty()) continue;
    LinExpr lhs = LinExpr::var(zeta_var);
    LinExpr rhs;
    for (const Slot* s : list) {
      rhs.add(s->t_var, 1.0 / N);
      rhs.add_constant(-s->chat.intercept / N);
      lhs.add(s->p_var, s->chat.slope / N);
    }
    prog.add_linear_le(lhs, rhs);
  }

  LinExpr obj = LinExpr::var(zeta_var);
  for (const auto& s : slots) obj.add(s.p_var, -eta);
  obj.add_constant(-eta * power_sum_const);
  prog.maximize(obj);

  out.report = prog.solve();
  for (const auto& s : slots) out.power(s.k, s.n - 1) = out.report.x[s.p_var];
  snap_bounds(out.power, cfg);
  out.zeta = std::max(0.0, out.report.x[zeta_var]);
  out.objective = out.report.objective;
  return out;
}

PowerRunResult optimize_power(const Eigen::MatrixXd& assoc_binary, const Trajectory& traj,
                              const PhaseSchedule& phases, const Eigen::MatrixXd& P_init,
                              const ScenarioConfig& cfg) {
  PowerRunResult out;
  const SlotGains gains = slot_gains(cfg, traj, phases, assoc_binary);

  // Powers on unserved pairs only burn the denominator; drop them up front.
  Eigen::MatrixXd P_inc = P_init;
  for (int n = 1; n <= cfg.num_slots; ++n)
    for (int k = 0; k < cfg.num_users; ++k)
      if (gains.served[static_cast<size_t>(n)] != k) P_inc(k, n - 1) = 0.0;
  snap_bounds(P_inc, cfg);

  auto exact = [&](const Eigen::MatrixXd& P) {
    return evaluate_detailed(cfg, traj, phases, make_allocation(assoc_binary, P));
  };
  RateReport inc = exact(P_inc);
  double gamma_inc = inc.gamma_exact;

  double eta = dinkelbach_eta(inc.zeta_exact, make_allocation(assoc_binary, P_inc),
                              cfg.circuit_power_w);
  out.eta = eta;

  for (int t = 0; t < cfg.dinkelbach_cap; ++t) {
    ++out.dinkelbach_iterations;
    double zeta_surr_prev = std::numeric_limits<double>::quiet_NaN();
    PowerSubproblemResult sub;
    for (int s = 0; s < cfg.sca_cap; ++s) {
      ++out.sca_iterations;
      sub = solve_power_subproblem(eta, assoc_binary, gains, cfg, P_inc);
      if (sub.report.status == SolveStatus::numerical_failure) {
        out.solver_failure = true;
        break;
      }
      RateReport cand = exact(sub.power);
      if (cand.gamma_exact >= gamma_inc - 1e-15 * std::max(1.0, gamma_inc)) {
        P_inc = sub.power;
        gamma_inc = cand.gamma_exact;
        inc = cand;
      } else {
        break;  // surrogate step did not survive exact evaluation
      }
      if (std::isfinite(zeta_surr_prev) &&
          std::abs(sub.zeta - zeta_surr_prev) <=
              cfg.sca_tol * std::max(std::abs(sub.zeta), 1e-300))
        break;
      zeta_surr_prev = sub.zeta;
    }

    const double denom = P_inc.sum() + cfg.circuit_power_w;
    out.final_F = sub.objective;
    const double eta_next = inc.zeta_exact / denom;
    const bool f_small = std::abs(out.final_F) <= 1e-6 * denom;
    const bool eta_stable =
        std::abs(eta_next - eta) <= cfg.dinkelbach_tol * std::max(eta_next, 1e-300);
    eta = eta_next;
    out.eta = eta;
    if (f_small && eta_stable) break;
    if (out.solver_failure) break;
  }

  out.power = P_inc;
  out.zeta = inc.zeta_exact;
  return out;
}

}  // namespace uavris
