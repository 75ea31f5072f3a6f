// Test-only reference implementations, kept independent of the library's
// computation paths so they can serve as oracles.

#ifndef UAVRIS_TEST_ORACLES_HPP
#define UAVRIS_TEST_ORACLES_HPP

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "uavris/scenario.hpp"
#include "uavris/types.hpp"

namespace oracles {

inline double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }

// Brute-force complex phasor sum, written against the raw model definition.
inline double cascade_magnitude(double amp_rx, double amp_tx, double phi_rx, double phi_tx,
                                double spacing_ratio, std::span<const double> theta) {
  std::complex<double> acc(0.0, 0.0);
  for (size_t m = 0; m < theta.size(); ++m) {
    const double progression = 2.0 * static_cast<double>(m) * std::numbers::pi *
                               spacing_ratio * (phi_rx - phi_tx);
    acc += std::exp(std::complex<double>(0.0, theta[m] + progression));
  }
  return amp_rx * amp_tx * std::abs(acc);
}

// Exhaustive search over every feasible binary association (at most one user
// per slot, silence allowed). Only viable for K, N <= 3.
inline double enumerate_best_min_average(const Eigen::MatrixXd& R) {
  const int K = static_cast<int>(R.rows());
  const int N = static_cast<int>(R.cols());
  std::vector<int> choice(static_cast<size_t>(N), -1);
  double best = 0.0;
  while (true) {
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(K);
    for (int n = 0; n < N; ++n)
      if (choice[static_cast<size_t>(n)] >= 0) sums[choice[static_cast<size_t>(n)]] += R(choice[static_cast<size_t>(n)], n);
    best = std::max(best, sums.minCoeff() / N);
    int d = 0;
    while (d < N) {
      if (++choice[static_cast<size_t>(d)] < K) break;
      choice[static_cast<size_t>(d)] = -1;
      ++d;
    }
    if (d == N) break;
  }
  return best;
}

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(uint64_t seed) : engine(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine);
  }
  uavris::Vec2 point(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }
};

inline uavris::ScenarioConfig mini_scenario() {
  uavris::ScenarioConfig cfg = uavris::default_paper_scenario();
  cfg.user_pos = {{220.0, 180.0}, {-200.0, -160.0}};
  cfg.num_users = 2;
  cfg.max_power_w.assign(2, 1.0);
  cfg.num_slots = 6;
  cfg.ris_elements = 4;
  cfg.period_s = 40.0;
  cfg.validate();
  return cfg;
}

}  // namespace oracles

#endif  // UAVRIS_TEST_ORACLES_HPP
