#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "uavris/rates.hpp"
#include "uavris/trajectory_s1.hpp"

using namespace uavris;

TEST_CASE("link rate formula") {
  CHECK(rate_bs(2.0, 0.5e-15, 1e-15) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rate_bs(0.0, 1e-12, 1e-15) == 0.0);
  CHECK(rate_bs(1.0, 1.6e-19, 1e-15) ==
        doctest::Approx(oracles::log2_1p(1.6e-4)).epsilon(1e-12));
  // monotone in transmit power
  CHECK(rate_bs(0.5, 1e-16, 1e-15) < rate_bs(0.9, 1e-16, 1e-15));
}

TEST_CASE("eavesdropper rate shares the functional form") {
  CHECK(rate_eve(1.0, 0.0, 1e-15) == 0.0);
  CHECK(rate_eve(1.0, 1e-16, 1e-15) == doctest::Approx(oracles::log2_1p(0.1)).epsilon(1e-12));
  CHECK(rate_eve(0.7, 3e-16, 2e-15) == rate_bs(0.7, 3e-16, 2e-15));
}

TEST_CASE("clamped weighted secrecy margin") {
  CHECK(secrecy_rate(1.0, 2.0, 3.0) == 0.0);
  CHECK(secrecy_rate(0.0, 5.0, 1.0) == 0.0);
  CHECK(secrecy_rate(1.0, 2.0, 0.5) == doctest::Approx(1.5));
  CHECK(secrecy_rate(0.25, 2.0, 1.0) == doctest::Approx(0.25));
}

TEST_CASE("fairness floor over per-user slot averages") {
  Eigen::MatrixXd R(2, 2);
  R << 1, 3, 2, 2;
  CHECK(min_avg_secrecy(R) == doctest::Approx(2.0));
  R << 0, 0, 5, 7;
  CHECK(min_avg_secrecy(R) == 0.0);
  R << 1, 0, 0, 1;
  CHECK(min_avg_secrecy(R) == doctest::Approx(0.5));
}

TEST_CASE("efficiency ratio") {
  Allocation alloc(2, 2);
  alloc.p(0, 1) = 1.0;
  alloc.p(1, 2) = 2.0;
  CHECK(secrecy_ee(2.0, alloc, 1.0) == doctest::Approx(0.5));
  CHECK(secrecy_ee(0.0, alloc, 1.0) == 0.0);
  // vanishes as circuit power grows
  double last = secrecy_ee(2.0, alloc, 1.0);
  for (double p0 : {10.0, 100.0, 1000.0}) {
    const double g = secrecy_ee(2.0, alloc, p0);
    CHECK(g < last);
    last = g;
  }
}

namespace {

SolutionState feasible_state(const ScenarioConfig& cfg, uint64_t seed) {
  SolutionState st;
  st.trajectory = initial_trajectory(cfg);
  st.phases = PhaseSchedule(cfg.ris_elements, cfg.num_slots);
  st.allocation = Allocation(cfg.num_users, cfg.num_slots);
  oracles::Rng rng(seed);
  for (int n = 1; n <= cfg.num_slots; ++n) {
    const int k = static_cast<int>(rng.uniform(0.0, cfg.num_users + 0.999));
    if (k >= cfg.num_users) continue;  // silent slot
    st.allocation.a(k, n) = 1.0;
    st.allocation.p(k, n) = rng.uniform(0.0, cfg.max_power(k));
    for (int m = 0; m < cfg.ris_elements; ++m)
      st.phases.at(m, n) = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  return st;
}

}  // namespace

TEST_CASE("evaluate: zero power means zero objective") {
  ScenarioConfig cfg = oracles::mini_scenario();
  SolutionState st = feasible_state(cfg, 1);
  for (auto& p : st.allocation.power) p = 0.0;
  auto [zeta, gamma] = evaluate(cfg, st);
  CHECK(zeta == 0.0);
  CHECK(gamma == 0.0);
}

TEST_CASE("evaluate matches a by-hand single-pair composition") {
  ScenarioConfig cfg = oracles::mini_scenario();
  cfg.user_pos = {{220.0, 180.0}};
  cfg.num_users = 1;
  cfg.max_power_w = {1.0};
  cfg.num_slots = 1;
  cfg.v_max_mps = 0.0;
  SolutionState st;
  st.trajectory = initial_trajectory(cfg);
  st.phases = PhaseSchedule(cfg.ris_elements, 1);
  st.allocation = Allocation(1, 1);
  st.allocation.a(0, 1) = 1.0;
  st.allocation.p(0, 1) = 0.8;
  for (int m = 0; m < cfg.ris_elements; ++m) st.phases.at(m, 1) = 0.3 * m;

  // independent composition from raw definitions
  const Vec2 q = st.trajectory.at(1);
  const double d_k = std::sqrt((q - cfg.user_pos[0]).norm2() + cfg.altitude_m * cfg.altitude_m);
  const double d_b = std::sqrt((q - cfg.bs_pos).norm2() + cfg.altitude_m * cfg.altitude_m);
  const double d_e = std::sqrt((q - cfg.eve_pos).norm2() + cfg.altitude_m * cfg.altitude_m);
  const double amp_k = std::sqrt(cfg.ref_gain * std::pow(d_k, -cfg.pathloss_exp));
  const double amp_b = std::sqrt(cfg.ref_gain * std::pow(d_b, -cfg.pathloss_exp));
  const double amp_e = std::sqrt(cfg.ref_gain * std::pow(d_e, -cfg.pathloss_exp));
  const double phi_k = (q.x - cfg.user_pos[0].x) / d_k;
  const double phi_b = (q.x - cfg.bs_pos.x) / d_b;
  const double phi_e = (q.x - cfg.eve_pos.x) / d_e;
  std::vector<double> theta(static_cast<size_t>(cfg.ris_elements));
  for (int m = 0; m < cfg.ris_elements; ++m) theta[static_cast<size_t>(m)] = 0.3 * m;
  const double g_b = oracles::cascade_magnitude(amp_b, amp_k, phi_b, phi_k,
                                                cfg.element_spacing_ratio, theta);
  const double g_e = oracles::cascade_magnitude(amp_e, amp_k, phi_e, phi_k,
                                                cfg.element_spacing_ratio, theta);
  const double r = oracles::log2_1p(0.8 * g_b * g_b / cfg.noise_w);
  const double c = oracles::log2_1p(0.8 * g_e * g_e / cfg.noise_w);
  const double zeta_manual = std::max(r - c, 0.0);
  const double gamma_manual = zeta_manual / (0.8 + cfg.circuit_power_w);

  auto [zeta, gamma] = evaluate(cfg, st);
  CHECK(zeta == doctest::Approx(zeta_manual).epsilon(1e-12));
  CHECK(gamma == doctest::Approx(gamma_manual).epsilon(1e-12));
}

TEST_CASE("definitional identity and eavesdropper-cap ordering") {
  ScenarioConfig cfg = oracles::mini_scenario();
  for (uint64_t seed = 0; seed < 100; ++seed) {
    SolutionState st = feasible_state(cfg, seed);
    RateReport rep = evaluate_detailed(cfg, st.trajectory, st.phases, st.allocation);
    const double denom = st.allocation.total_power() + cfg.circuit_power_w;
    CHECK(rep.gamma_exact * denom == doctest::Approx(rep.zeta_exact).epsilon(1e-9));
    // the coherent cap makes the eavesdropper stronger, never weaker
    CHECK(rep.zeta_bound <= rep.zeta_exact * (1.0 + 1e-12) + 1e-300);
  }
}

TEST_CASE("evaluate is deterministic") {
  ScenarioConfig cfg = oracles::mini_scenario();
  SolutionState st = feasible_state(cfg, 3);
  auto [z1, g1] = evaluate(cfg, st);
  auto [z2, g2] = evaluate(cfg, st);
  CHECK(z1 == z2);
  CHECK(g1 == g2);
}

TEST_CASE("evaluate rejects infeasible states") {
  ScenarioConfig cfg = oracles::mini_scenario();
  SUBCASE("two users in one slot") {
    SolutionState st = feasible_state(cfg, 4);
    st.allocation.a(0, 1) = 1.0;
    st.allocation.a(1, 1) = 1.0;
    CHECK_THROWS_AS(evaluate(cfg, st), InfeasibleError);
  }
  SUBCASE("power above the cap") {
    SolutionState st = feasible_state(cfg, 5);
    st.allocation.a(0, 1) = 1.0;
    st.allocation.p(0, 1) = cfg.max_power(0) * 1.5;
    CHECK_THROWS_AS(evaluate(cfg, st), InfeasibleError);
  }
  SUBCASE("broken loop closure") {
    SolutionState st = feasible_state(cfg, 6);
    st.trajectory.points.back().x += 5.0;
    CHECK_THROWS_AS(evaluate(cfg, st), InfeasibleError);
  }
}
