#ifndef UAVRIS_SCENARIO_HPP
#define UAVRIS_SCENARIO_HPP

#include <optional>
#include <string>
#include <vector>

#include "uavris/types.hpp"

namespace uavris {

/// All physical and algorithmic parameters in linear SI units
/// (lengths in meters, powers in watts, angles in radians).
struct ScenarioConfig {
  int num_users = 0;                  // K
  int num_slots = 0;                  // N
  double period_s = 0.0;              // T
  double altitude_m = 0.0;            // H, fixed flight height
  double v_max_mps = 0.0;             // maximum horizontal speed
  double pathloss_exp = 2.0;          // alpha >= 2
  int ris_elements = 0;               // M
  double element_spacing_ratio = 0.5; // d / lambda
  double ref_gain = 0.0;              // h0, linear power ratio at 1 m
  double noise_w = 0.0;               // sigma^2
  double circuit_power_w = 0.0;       // P0
  std::vector<double> max_power_w;    // P_k, per user
  double af_relay_power_w = 0.0;      // P_UAV (relay baseline only)

  Vec2 bs_pos{};
  Vec2 eve_pos{};
  std::vector<Vec2> user_pos;
  std::optional<Vec2> start_pos;      // q0; defaults to the first polygon waypoint

  // Stopping tolerances and iteration caps.
  double outer_tol = 1e-4;            // relative, on the efficiency objective
  double dinkelbach_tol = 1e-4;       // relative, on the fractional multiplier
  double sca_tol = 1e-3;              // relative, inner convexification loops
  int outer_cap = 50;
  int dinkelbach_cap = 30;
  int sca_cap = 30;

  double slot_s() const { return period_s / num_slots; }
  double s_max() const { return v_max_mps * period_s / num_slots; }
  double max_power(int k) const { return max_power_w.at(static_cast<size_t>(k)); }

  /// Throws ConfigError when any invariant is violated.
  void validate() const;
};

/// Parses a JSON scenario document. Keys with a `_db` suffix are power
/// ratios 10^(x/10); `_dbm` keys convert to watts with a -30 dB offset.
/// Throws ConfigError on missing keys, non-positive physical quantities,
/// or an `s_max` entry inconsistent with v_max * T / N.
ScenarioConfig parse_config(const std::string& text);

/// Serializes to JSON with every quantity in linear SI units, so that
/// parse_config(serialize_config(cfg)) reproduces cfg field for field.
std::string serialize_config(const ScenarioConfig& cfg);

/// The evaluation setup used throughout the reference experiments:
/// 4 users at (+-300, +-300) m, BS at the origin, eavesdropper at (0, 200) m,
/// T = 80 s, N = 12, H = 100 m, v_max = 50 m/s, alpha = 2.2, M = 10,
/// d/lambda = 0.5, h0 = -80 dB, sigma^2 = -120 dBm, P0 = P_k = 1 W,
/// P_UAV = 0.2 W.
ScenarioConfig default_paper_scenario();

/// Closed starting path: waypoints at half of each user position ordered by
/// angle around the BS, resampled to N equal arc-length points. If the
/// per-slot spacing would exceed s_max the polygon is shrunk uniformly
/// toward its centroid until feasible (s_max = 0 degenerates to hovering).
Trajectory initial_trajectory(const ScenarioConfig& cfg);

/// Checks closure and the per-slot speed bound within tol meters.
bool trajectory_feasible(const Trajectory& traj, const ScenarioConfig& cfg, double tol = 1e-9);

}  // namespace uavris

#endif  // UAVRIS_SCENARIO_HPP
