#include "uavris/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace uavris {

using nlohmann::json;

namespace {

constexpr double kShrinkMargin = 1e-9;  // keeps speed constraints strictly interior

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// Reads a power-like quantity given as `key` (linear), `key_db`, or `key_dbm`.
double read_power(const json& j, const std::string& key, bool required, double fallback = 0.0) {
  if (j.contains(key)) return j.at(key).get<double>();
  if (j.contains(key + "_db")) return db_to_linear(j.at(key + "_db").get<double>());
  if (j.contains(key + "_dbm")) return dbm_to_watts(j.at(key + "_dbm").get<double>());
  if (required) throw ConfigError("missing key: " + key);
  return fallback;
}

double read_number(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("missing key: " + key);
  return j.at(key).get<double>();
}

Vec2 read_vec2(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("missing key: " + key);
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 2) throw ConfigError("key " + key + " must be [x, y]");
  return {a[0].get<double>(), a[1].get<double>()};
}

void require_positive(double v, const std::string& name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("non-positive quantity: " + name);
}

}  // namespace

void ScenarioConfig::validate() const {
  if (num_users < 1) throw ConfigError("num_users must be >= 1");
  if (num_slots < 1) throw ConfigError("num_slots must be >= 1");
  if (ris_elements < 1) throw ConfigError("ris_elements must be >= 1");
  require_positive(period_s, "T");
  require_positive(altitude_m, "H");
  if (v_max_mps < 0.0) throw ConfigError("v_max must be >= 0");
  if (pathloss_exp < 2.0) throw ConfigError("alpha must be >= 2");
  require_positive(element_spacing_ratio, "d_over_lambda");
  require_positive(ref_gain, "h0");
  require_positive(noise_w, "sigma2");
  require_positive(circuit_power_w, "P0");
  if (max_power_w.size() != static_cast<size_t>(num_users))
    throw ConfigError("P_max must have one entry per user");
  for (double p : max_power_w) require_positive(p, "P_max");
  if (af_relay_power_w < 0.0) throw ConfigError("P_uav must be >= 0");
  if (user_pos.size() != static_cast<size_t>(num_users))
    throw ConfigError("users must have num_users entries");
  require_positive(outer_tol, "outer_tol");
  require_positive(dinkelbach_tol, "dinkelbach_tol");
  require_positive(sca_tol, "sca_tol");
  if (outer_cap < 1 || dinkelbach_cap < 1 || sca_cap < 1)
    throw ConfigError("iteration caps must be >= 1");
}

ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid scenario document: ") + e.what());
  }

  ScenarioConfig cfg;
  if (!j.contains("users") || !j.at("users").is_array() || j.at("users").empty())
    throw ConfigError("missing key: users");
  for (const auto& u : j.at("users")) {
    if (!u.is_array() || u.size() != 2) throw ConfigError("users entries must be [x, y]");
    cfg.user_pos.push_back({u[0].get<double>(), u[1].get<double>()});
  }
  cfg.num_users = static_cast<int>(cfg.user_pos.size());
  cfg.num_slots = static_cast<int>(read_number(j, "N"));
  cfg.period_s = read_number(j, "T");
  cfg.altitude_m = read_number(j, "H");
  cfg.v_max_mps = read_number(j, "v_max");
  cfg.pathloss_exp = read_number(j, "alpha");
  cfg.ris_elements = static_cast<int>(read_number(j, "M"));
  cfg.element_spacing_ratio = j.value("d_over_lambda", 0.5);
  cfg.ref_gain = read_power(j, "h0", true);
  cfg.noise_w = read_power(j, "sigma2", true);
  cfg.circuit_power_w = read_power(j, "P0", true);
  cfg.af_relay_power_w = read_power(j, "P_uav", false, 0.0);
  cfg.bs_pos = read_vec2(j, "bs_pos");
  cfg.eve_pos = read_vec2(j, "eve_pos");
  if (j.contains("q0")) cfg.start_pos = read_vec2(j, "q0");

  if (j.contains("P_max") && j.at("P_max").is_array()) {
    for (const auto& p : j.at("P_max")) cfg.max_power_w.push_back(p.get<double>());
  } else {
    double p = read_power(j, "P_max", true);
    cfg.max_power_w.assign(static_cast<size_t>(cfg.num_users), p);
  }

  cfg.outer_tol = j.value("outer_tol", cfg.outer_tol);
  cfg.dinkelbach_tol = j.value("dinkelbach_tol", cfg.dinkelbach_tol);
  cfg.sca_tol = j.value("sca_tol", cfg.sca_tol);
  cfg.outer_cap = j.value("outer_cap", cfg.outer_cap);
  cfg.dinkelbach_cap = j.value("dinkelbach_cap", cfg.dinkelbach_cap);
  cfg.sca_cap = j.value("sca_cap", cfg.sca_cap);

  cfg.validate();

  if (j.contains("s_max")) {
    const double declared = j.at("s_max").get<double>();
    const double derived = cfg.s_max();
    if (std::abs(declared - derived) > 1e-6 * std::max(1.0, std::abs(derived)))
      throw ConfigError("s_max inconsistent with v_max * T / N");
  }
  return cfg;
}

std::string serialize_config(const ScenarioConfig& cfg) {
  json j;
  j["N"] = cfg.num_slots;
  j["T"] = cfg.period_s;
  j["H"] = cfg.altitude_m;
  j["v_max"] = cfg.v_max_mps;
  j["alpha"] = cfg.pathloss_exp;
  j["M"] = cfg.ris_elements;
  j["d_over_lambda"] = cfg.element_spacing_ratio;
  j["h0"] = cfg.ref_gain;
  j["sigma2"] = cfg.noise_w;
  j["P0"] = cfg.circuit_power_w;
  j["P_max"] = cfg.max_power_w;
  j["P_uav"] = cfg.af_relay_power_w;
  j["bs_pos"] = {cfg.bs_pos.x, cfg.bs_pos.y};
  j["eve_pos"] = {cfg.eve_pos.x, cfg.eve_pos.y};
  json users = json::array();
  for (const auto& u : cfg.user_pos) users.push_back({u.x, u.y});
  j["users"] = users;
  if (cfg.start_pos) j["q0"] = {cfg.start_pos->x, cfg.start_pos->y};
  j["outer_tol"] = cfg.outer_tol;
  j["dinkelbach_tol"] = cfg.dinkelbach_tol;
  j["sca_tol"] = cfg.sca_tol;
  j["outer_cap"] = cfg.outer_cap;
  j["dinkelbach_cap"] = cfg.dinkelbach_cap;
  j["sca_cap"] = cfg.sca_cap;
  return j.dump(2);
}

ScenarioConfig default_paper_scenario() {
  ScenarioConfig cfg;
  cfg.user_pos = {{300.0, 300.0}, {-300.0, 300.0}, {-300.0, -300.0}, {300.0, -300.0}};
  cfg.num_users = 4;
  cfg.num_slots = 12;
  cfg.period_s = 80.0;
  cfg.altitude_m = 100.0;
  cfg.v_max_mps = 50.0;
  cfg.pathloss_exp = 2.2;
  cfg.ris_elements = 10;
  cfg.element_spacing_ratio = 0.5;
  cfg.ref_gain = db_to_linear(-80.0);
  cfg.noise_w = dbm_to_watts(-120.0);
  cfg.circuit_power_w = 1.0;
  cfg.max_power_w.assign(4, 1.0);
  cfg.af_relay_power_w = 0.2;
  cfg.bs_pos = {0.0, 0.0};
  cfg.eve_pos = {0.0, 200.0};
  cfg.start_pos = Vec2{150.0, 150.0};
  cfg.validate();
  return cfg;
}

namespace {

// Waypoints at half of each user position, ordered by angle around the BS.
std::vector<Vec2> polygon_waypoints(const ScenarioConfig& cfg) {
  std::vector<Vec2> wp;
  wp.reserve(cfg.user_pos.size());
  for (const auto& u : cfg.user_pos) wp.push_back(u * 0.5);
  std::vector<size_t> order(wp.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto angle = [&](size_t i) {
    Vec2 d = wp[i] - cfg.bs_pos;
    double a = std::atan2(d.y, d.x);
    if (a < 0.0) a += 2.0 * std::numbers::pi;
    return a;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t i, size_t j) { return angle(i) < angle(j); });
  std::vector<Vec2> out;
  out.reserve(wp.size());
  for (size_t i : order) out.push_back(wp[i]);
  return out;
}

}  // namespace

Trajectory initial_trajectory(const ScenarioConfig& cfg) {
  cfg.validate();
  const int n_slots = cfg.num_slots;
  std::vector<Vec2> wp = polygon_waypoints(cfg);

  Vec2 centroid{0.0, 0.0};
  for (const auto& w : wp) centroid = centroid + w;
  centroid = centroid * (1.0 / static_cast<double>(wp.size()));

  // Closed polyline through the waypoints.
  auto perimeter = [&](double scale) {
    double len = 0.0;
    for (size_t i = 0; i < wp.size(); ++i) {
      Vec2 a = centroid + (wp[i] - centroid) * scale;
      Vec2 b = centroid + (wp[(i + 1) % wp.size()] - centroid) * scale;
      len += (b - a).norm();
    }
    return len;
  };

  const double s_max = cfg.s_max();
  double scale = 1.0;
  const double full_len = perimeter(1.0);
  if (full_len > 0.0) {
    const double max_len = s_max * (1.0 - kShrinkMargin) * n_slots;
    if (full_len > max_len) scale = max_len / full_len;  // perimeter is linear in scale
  }

  Trajectory traj;
  traj.points.assign(static_cast<size_t>(n_slots) + 1, centroid);
  if (full_len <= 0.0 || scale <= 0.0) {
    return traj;  // hover at the centroid (single waypoint or zero speed)
  }

  std::vector<Vec2> v;
  v.reserve(wp.size() + 1);
  for (const auto& w : wp) v.push_back(centroid + (w - centroid) * scale);
  v.push_back(v.front());

  std::vector<double> seg_len(v.size() - 1);
  double total = 0.0;
  for (size_t i = 0; i + 1 < v.size(); ++i) {
    seg_len[i] = (v[i + 1] - v[i]).norm();
    total += seg_len[i];
  }

  // Equal arc-length resampling starting at the first waypoint.
  for (int n = 0; n <= n_slots; ++n) {
    double target = total * static_cast<double>(n) / n_slots;
    if (n == n_slots) {
      traj.points[static_cast<size_t>(n)] = v.front();
      continue;
    }
    size_t seg = 0;
    double acc = 0.0;
    while (seg < seg_len.size() && acc + seg_len[seg] < target) {
      acc += seg_len[seg];
      ++seg;
    }
    if (seg >= seg_len.size()) {
      traj.points[static_cast<size_t>(n)] = v.back();
      continue;
    }
    double t = seg_len[seg] > 0.0 ? (target - acc) / seg_len[seg] : 0.0;
    traj.points[static_cast<size_t>(n)] = v[seg] + (v[seg + 1] - v[seg]) * t;
  }
  traj.points.back() = traj.points.front();
  return traj;
}

bool trajectory_feasible(const Trajectory& traj, const ScenarioConfig& cfg, double tol) {
  if (traj.num_slots() != cfg.num_slots) return false;
  if ((traj.points.back() - traj.points.front()).norm() > tol) return false;
  const double s_max = cfg.s_max();
  for (int n = 1; n <= cfg.num_slots; ++n) {
    if ((traj.at(n) - traj.at(n - 1)).norm() > s_max + tol) return false;
  }
  return true;
}

}  // namespace uavris
