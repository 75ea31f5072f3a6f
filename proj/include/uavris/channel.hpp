#ifndef UAVRIS_CHANNEL_HPP
#define UAVRIS_CHANNEL_HPP

#include <complex>
#include <span>

#include "uavris/scenario.hpp"
#include "uavris/types.hpp"

namespace uavris {

/// Deterministic line-of-sight link toward a uniform linear array:
/// g = amplitude * [1, e^{-j 2 pi (d/lambda) phi}, ..., e^{-j 2 (M-1) pi (d/lambda) phi}]^T
/// where phi is the x-axis cosine of the angle of arrival.
struct SteeringChannel {
  double amplitude = 0.0;       // sqrt(h0 * d^-alpha), per element
  double aoa_cos = 0.0;         // phi in [-1, 1]
  double spacing_ratio = 0.5;   // d / lambda
  int length = 0;               // M
};

/// sqrt(||q - w||^2 + H^2); never below H.
double distance(const Vec2& q, const Vec2& w, double altitude);

/// (x - x_w) / distance, the ULA-resolved direction cosine; in [-1, 1].
double aoa_cosine(const Vec2& q, const Vec2& w, double altitude);

SteeringChannel steering_channel(const Vec2& q, const Vec2& w, double altitude,
                                 const ScenarioConfig& cfg);

/// End-to-end complex gain g_rx^H * diag(e^{j theta}) * g_tx =
/// amp_rx * amp_tx * sum_m e^{j(theta_m + 2 (m-1) pi (d/lambda) (phi_rx - phi_tx))}.
/// Its magnitude never exceeds amp_rx * amp_tx * M.
/// Throws Error on element-count mismatch.
std::complex<double> cascaded_gain(const SteeringChannel& rx, std::span<const double> theta,
                                   const SteeringChannel& tx);

/// Squared cascaded gain when the phases align every element coherently:
/// h0^2 M^2 / (d_rx^alpha * d_tx^alpha).
double aligned_gain_power(double d_rx, double d_tx, const ScenarioConfig& cfg);

/// Squared user->RIS->eavesdropper gain. With exact=true the phase sum is
/// evaluated against the supplied schedule; with exact=false the coherent
/// M^2 cap is used instead. The exact value never exceeds the cap.
double eve_gain_power(bool exact, const Vec2& q, const Vec2& user, const ScenarioConfig& cfg,
                      std::span<const double> theta);

}  // namespace uavris

#endif  // UAVRIS_CHANNEL_HPP
