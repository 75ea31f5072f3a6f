#include "uavris/sweep.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "uavris/baseline_af.hpp"
#include "uavris/report.hpp"

namespace uavris {

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "H") return SweepAxis::altitude;
  if (name == "alpha") return SweepAxis::pathloss;
  if (name == "Pk") return SweepAxis::max_power;
  if (name == "M") return SweepAxis::ris_elements;
  if (name == "vmax") return SweepAxis::v_max;
  throw ConfigError("unknown sweep axis: " + name + " (expected H|alpha|Pk|M|vmax)");
}

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::altitude: return "H";
    case SweepAxis::pathloss: return "alpha";
    case SweepAxis::max_power: return "Pk";
    case SweepAxis::ris_elements: return "M";
    case SweepAxis::v_max: return "vmax";
  }
  return "?";
}

ScenarioConfig apply_axis(const ScenarioConfig& cfg, SweepAxis axis, double value) {
  ScenarioConfig out = cfg;
  switch (axis) {
    case SweepAxis::altitude:
      out.altitude_m = value;
      break;
    case SweepAxis::pathloss:
      out.pathloss_exp = value;
      break;
    case SweepAxis::max_power:
      out.max_power_w.assign(static_cast<size_t>(cfg.num_users), value);
      break;
    case SweepAxis::ris_elements: {
      const double rounded = std::round(value);
      if (std::abs(value - rounded) > 1e-9 || rounded < 1.0)
        throw ConfigError("M sweep values must be positive integers");
      out.ris_elements = static_cast<int>(rounded);
      break;
    }
    case SweepAxis::v_max:
      out.v_max_mps = value;
      break;
  }
  out.validate();
  return out;
}

SweepResult run_sweep(const ScenarioConfig& cfg, SweepAxis axis,
                      const std::vector<double>& values, Scheme scheme, bool with_baseline,
                      int jobs) {
  SweepResult result;
  result.axis = axis;
  result.points.resize(values.size());

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= values.size()) return;
      SweepPoint& pt = result.points[i];
      pt.value = values[i];
      try {
        const ScenarioConfig point_cfg = apply_axis(cfg, axis, values[i]);
        RunResult run = run_algorithm2(point_cfg, scheme);
        pt.zeta = run.state.zeta;
        pt.gamma = run.state.gamma;
        if (with_baseline) pt.gamma_baseline = run_baseline(point_cfg).state.gamma;
      } catch (const std::exception& e) {
        pt.failed = true;
        pt.error = e.what();
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(values.size())));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream os;
  os.precision(17);
  const bool with_baseline =
      !result.points.empty() && result.points.front().gamma_baseline.has_value();
  os << sweep_axis_name(result.axis)
     << ",zeta_bits_per_s_per_hz,gamma_per_watt";
  if (with_baseline) os << ",gamma_baseline_per_watt";
  os << ",status\n";
  for (const auto& pt : result.points) {
    os << pt.value << ',' << pt.zeta << ',' << pt.gamma;
    if (with_baseline) os << ',' << (pt.gamma_baseline ? *pt.gamma_baseline : 0.0);
    os << ',' << (pt.failed ? "failed" : "ok") << '\n';
  }
  return os.str();
}

std::string sweep_svg(const SweepResult& result) {
  Series main;
  main.label = "optimized";
  Series base;
  base.label = "relay baseline";
  for (const auto& pt : result.points) {
    if (pt.failed) continue;
    main.x.push_back(pt.value);
    main.y.push_back(pt.gamma);
    if (pt.gamma_baseline) {
      base.x.push_back(pt.value);
      base.y.push_back(*pt.gamma_baseline);
    }
  }
  std::vector<Series> series{main};
  if (!base.x.empty()) series.push_back(base);
  return line_plot_svg(sweep_axis_name(result.axis),
                       "secrecy energy efficiency [(bits/s/Hz)/W]", series);
}

}  // namespace uavris
