#include "uavris/channel.hpp"

#include <cmath>
#include <numbers>

namespace uavris {

double distance(const Vec2& q, const Vec2& w, double altitude) {
  return std::sqrt((q - w).norm2() + altitude * altitude);
}

double aoa_cosine(const Vec2& q, const Vec2& w, double altitude) {
  return (q.x - w.x) / distance(q, w, altitude);
}

SteeringChannel steering_channel(const Vec2& q, const Vec2& w, double altitude,
                                 const ScenarioConfig& cfg) {
  const double d = distance(q, w, altitude);
  SteeringChannel ch;
  ch.amplitude = std::sqrt(cfg.ref_gain * std::pow(d, -cfg.pathloss_exp));
  ch.aoa_cos = aoa_cosine(q, w, altitude);
  ch.spacing_ratio = cfg.element_spacing_ratio;
  ch.length = cfg.ris_elements;
  return ch;
}

std::complex<double> cascaded_gain(const SteeringChannel& rx, std::span<const double> theta,
                                   const SteeringChannel& tx) {
  if (rx.length != tx.length || static_cast<size_t>(rx.length) != theta.size())
    throw Error("cascaded_gain: element count mismatch");
  const double step =
      2.0 * std::numbers::pi * rx.spacing_ratio * (rx.aoa_cos - tx.aoa_cos);
  std::complex<double> sum{0.0, 0.0};
  for (int m = 0; m < rx.length; ++m) {
    const double phase = theta[static_cast<size_t>(m)] + static_cast<double>(m) * step;
    sum += std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return rx.amplitude * tx.amplitude * sum;
}

double aligned_gain_power(double d_rx, double d_tx, const ScenarioConfig& cfg) {
  const double m = static_cast<double>(cfg.ris_elements);
  return cfg.ref_gain * cfg.ref_gain * m * m /
         (std::pow(d_rx, cfg.pathloss_exp) * std::pow(d_tx, cfg.pathloss_exp));
}

double eve_gain_power(bool exact, const Vec2& q, const Vec2& user, const ScenarioConfig& cfg,
                      std::span<const double> theta) {
  const double d_k = distance(q, user, cfg.altitude_m);
  const double d_e = distance(q, cfg.eve_pos, cfg.altitude_m);
  const double denom = std::pow(d_k, cfg.pathloss_exp) * std::pow(d_e, cfg.pathloss_exp);
  const double m = static_cast<double>(cfg.ris_elements);
  if (!exact) return cfg.ref_gain * cfg.ref_gain * m * m / denom;

  const double phi_k = aoa_cosine(q, user, cfg.altitude_m);
  const double phi_e = aoa_cosine(q, cfg.eve_pos, cfg.altitude_m);
  const double step = 2.0 * std::numbers::pi * cfg.element_spacing_ratio * (phi_e - phi_k);
  std::complex<double> sum{0.0, 0.0};
  for (int i = 0; i < cfg.ris_elements; ++i) {
    const double phase = theta[static_cast<size_t>(i)] + static_cast<double>(i) * step;
    sum += std::complex<double>(std::cos(phase), std::sin(phase));
  }
  const double c = std::abs(sum);
  return cfg.ref_gain * cfg.ref_gain * c * c / denom;
}

}  // namespace uavris
