#include "uavris/rates.hpp"

#include <cmath>
#include <numbers>

namespace uavris {

namespace {
constexpr double kFeasTol = 1e-6;

double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }
}  // namespace

double rate_bs(double p, double gain_power, double noise) {
  return log2_1p(p * gain_power / noise);
}

double rate_eve(double p, double gain_power_eve, double noise) {
  return log2_1p(p * gain_power_eve / noise);
}

double secrecy_rate(double assoc_frac, double r, double c) {
  return assoc_frac * std::max(r - c, 0.0);
}

double min_avg_secrecy(const Eigen::MatrixXd& R) {
  if (R.rows() == 0 || R.cols() == 0) return 0.0;
  return R.rowwise().mean().minCoeff();
}

double secrecy_ee(double zeta, const Allocation& alloc, double circuit_power) {
  return zeta / (alloc.total_power() + circuit_power);
}

namespace {

void check_state(const ScenarioConfig& cfg, const Trajectory& traj,
                 const PhaseSchedule& phases, const Allocation& alloc) {
  if (alloc.num_users != cfg.num_users || alloc.num_slots != cfg.num_slots)
    throw InfeasibleError("allocation dimensions do not match the scenario");
  if (phases.num_elements != cfg.ris_elements || phases.num_slots != cfg.num_slots)
    throw InfeasibleError("phase schedule dimensions do not match the scenario");
  if (!trajectory_feasible(traj, cfg, kFeasTol * std::max(1.0, cfg.s_max())))
    throw InfeasibleError("trajectory violates closure or speed limits");
  for (int n = 1; n <= cfg.num_slots; ++n) {
    double sum = 0.0;
    for (int k = 0; k < cfg.num_users; ++k) {
      const double a = alloc.a(k, n);
      if (a < -kFeasTol || a > 1.0 + kFeasTol)
        throw InfeasibleError("association entry outside [0, 1]");
      const double p = alloc.p(k, n);
      if (p < -kFeasTol || p > cfg.max_power(k) * (1.0 + kFeasTol))
        throw InfeasibleError("power entry outside [0, P_max]");
      sum += a;
    }
    if (sum > 1.0 + kFeasTol) throw InfeasibleError("more than one user served in a slot");
  }
}

}  // namespace

RateReport evaluate_detailed(const ScenarioConfig& cfg, const Trajectory& traj,
                             const PhaseSchedule& phases, const Allocation& alloc) {
  check_state(cfg, traj, phases, alloc);
  const int K = cfg.num_users;
  const int N = cfg.num_slots;
  RateReport rep;
  rep.rate = Eigen::MatrixXd::Zero(K, N);
  rep.eve_exact = Eigen::MatrixXd::Zero(K, N);
  rep.eve_bound = Eigen::MatrixXd::Zero(K, N);
  rep.secrecy_exact = Eigen::MatrixXd::Zero(K, N);
  rep.secrecy_bound = Eigen::MatrixXd::Zero(K, N);

  for (int n = 1; n <= N; ++n) {
    const Vec2 q = traj.at(n);
    std::span<const double> theta(phases.column(n), static_cast<size_t>(phases.num_elements));
    const SteeringChannel g_b = steering_channel(q, cfg.bs_pos, cfg.altitude_m, cfg);
    for (int k = 0; k < K; ++k) {
      const double a = alloc.a(k, n);
      if (a <= 0.0) continue;
      const double p = alloc.p(k, n);
      const SteeringChannel g_k = steering_channel(q, cfg.user_pos[static_cast<size_t>(k)],
                                                   cfg.altitude_m, cfg);
      const double gain_bs = std::norm(cascaded_gain(g_b, theta, g_k));
      const double gain_eve =
          eve_gain_power(true, q, cfg.user_pos[static_cast<size_t>(k)], cfg, theta);
      const double gain_eve_cap =
          eve_gain_power(false, q, cfg.user_pos[static_cast<size_t>(k)], cfg, theta);
      const double r = rate_bs(p, gain_bs, cfg.noise_w);
      const double c = rate_eve(p, gain_eve, cfg.noise_w);
      const double c_cap = rate_eve(p, gain_eve_cap, cfg.noise_w);
      rep.rate(k, n - 1) = r;
      rep.eve_exact(k, n - 1) = c;
      rep.eve_bound(k, n - 1) = c_cap;
      rep.secrecy_exact(k, n - 1) = secrecy_rate(a, r, c);
      rep.secrecy_bound(k, n - 1) = secrecy_rate(a, r, c_cap);
    }
  }

  rep.zeta_exact = min_avg_secrecy(rep.secrecy_exact);
  rep.zeta_bound = min_avg_secrecy(rep.secrecy_bound);
  rep.gamma_exact = secrecy_ee(rep.zeta_exact, alloc, cfg.circuit_power_w);
  rep.gamma_bound = secrecy_ee(rep.zeta_bound, alloc, cfg.circuit_power_w);
  return rep;
}

std::pair<double, double> evaluate(const ScenarioConfig& cfg, const SolutionState& state) {
  RateReport rep = evaluate_detailed(cfg, state.trajectory, state.phases, state.allocation);
  return {rep.zeta_exact, rep.gamma_exact};
}

Eigen::MatrixXd association_rate_matrix(const ScenarioConfig& cfg, const Trajectory& traj,
                                        const PhaseSchedule& phases, const Allocation& alloc) {
  const int K = cfg.num_users;
  const int N = cfg.num_slots;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(K, N);
  for (int n = 1; n <= N; ++n) {
    const Vec2 q = traj.at(n);
    std::span<const double> theta(phases.column(n), static_cast<size_t>(phases.num_elements));
    const SteeringChannel g_b = steering_channel(q, cfg.bs_pos, cfg.altitude_m, cfg);
    for (int k = 0; k < K; ++k) {
      double p = alloc.p(k, n);
      if (p <= 0.0) p = cfg.max_power(k);
      const SteeringChannel g_k = steering_channel(q, cfg.user_pos[static_cast<size_t>(k)],
                                                   cfg.altitude_m, cfg);
      const double gain_bs = std::norm(cascaded_gain(g_b, theta, g_k));
      const double gain_eve =
          eve_gain_power(true, q, cfg.user_pos[static_cast<size_t>(k)], cfg, theta);
      const double r = rate_bs(p, gain_bs, cfg.noise_w);
      const double c = rate_eve(p, gain_eve, cfg.noise_w);
      R(k, n - 1) = std::max(r - c, 0.0);
    }
  }
  return R;
}

}  // namespace uavris
