#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "uavris/assoc.hpp"

using namespace uavris;

TEST_CASE("two users, two slots: the exchange-optimal schedule") {
  Eigen::MatrixXd R(2, 2);
  R << 1, 0, 0, 1;
  // enumeration oracle first: the best binary schedule reaches 0.5
  const double best = oracles::enumerate_best_min_average(R);
  CHECK(best == doctest::Approx(0.5));

  AssociationLp lp = solve_association_lp(R);
  CHECK(lp.zeta == doctest::Approx(best).epsilon(1e-5));
  CHECK(lp.fractional(0, 0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(lp.fractional(1, 1) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(lp.fractional(1, 0) == 0.0);  // zero-rate pair cleared among optima

  Eigen::MatrixXd bin = round_association(lp.fractional);
  CHECK(bin(0, 0) == 1.0);
  CHECK(bin(1, 1) == 1.0);
  CHECK(bin.sum() == doctest::Approx(2.0));
}

TEST_CASE("a user with no usable slot pins the objective at zero") {
  Eigen::MatrixXd R(3, 2);
  R << 0, 0, 1, 2, 2, 1;
  AssociationLp lp = solve_association_lp(R);
  CHECK(lp.zeta == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("single user takes every usable slot") {
  Eigen::MatrixXd R(1, 4);
  R << 0.5, 0.0, 1.5, 2.0;
  AssociationLp lp = solve_association_lp(R);
  CHECK(lp.zeta == doctest::Approx((0.5 + 1.5 + 2.0) / 4.0).epsilon(1e-5));
  Eigen::MatrixXd bin = round_association(lp.fractional);
  CHECK(bin(0, 0) == 1.0);
  CHECK(bin(0, 1) == 0.0);  // zero-rate slot stays silent
  CHECK(bin(0, 2) == 1.0);
  CHECK(bin(0, 3) == 1.0);
}

TEST_CASE("rounding rules") {
  Eigen::MatrixXd frac(2, 3);
  frac << 0.7, 0.5, 0.0,
          0.3, 0.5, 0.0;
  Eigen::MatrixXd bin = round_association(frac);
  CHECK(bin(0, 0) == 1.0);
  CHECK(bin(1, 0) == 0.0);
  CHECK(bin(0, 1) == 1.0);  // tie broken toward the lowest index
  CHECK(bin(1, 1) == 0.0);
  CHECK(bin.col(2).sum() == 0.0);  // silent slot
}

TEST_CASE("relaxation dominates its rounding") {
  oracles::Rng rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    const int K = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
    const int N = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
    Eigen::MatrixXd R(K, N);
    for (int k = 0; k < K; ++k)
      for (int n = 0; n < N; ++n)
        R(k, n) = rng.uniform(0.0, 1.0) < 0.25 ? 0.0 : rng.uniform(0.0, 2.0);
    AssociationLp lp = solve_association_lp(R);
    Eigen::MatrixXd bin = round_association(lp.fractional);

    Eigen::VectorXd sums = Eigen::VectorXd::Zero(K);
    for (int n = 0; n < N; ++n)
      for (int k = 0; k < K; ++k)
        if (bin(k, n) > 0.5) sums[k] += R(k, n);
    const double rounded = sums.minCoeff() / N;
    CHECK(lp.zeta >= rounded - 1e-6 * std::max(1.0, rounded));
    CHECK(rounded >= 0.0);
    for (int n = 0; n < N; ++n) CHECK(bin.col(n).sum() <= 1.0);
  }
}

TEST_CASE("integral relaxations match exhaustive enumeration") {
  oracles::Rng rng(505);
  int integral_cases = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
    const int N = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
    Eigen::MatrixXd R(K, N);
    for (int k = 0; k < K; ++k)
      for (int n = 0; n < N; ++n)
        R(k, n) = rng.uniform(0.0, 1.0) < 0.3 ? 0.0 : rng.uniform(0.1, 2.0);
    AssociationLp lp = solve_association_lp(R);

    bool integral = true;
    for (int k = 0; k < K && integral; ++k)
      for (int n = 0; n < N && integral; ++n)
        if (std::abs(lp.fractional(k, n) - std::round(lp.fractional(k, n))) > 1e-4)
          integral = false;
    if (!integral) continue;
    ++integral_cases;

    Eigen::MatrixXd bin = round_association(lp.fractional);
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(K);
    for (int n = 0; n < N; ++n)
      for (int k = 0; k < K; ++k)
        if (bin(k, n) > 0.5) sums[k] += R(k, n);
    const double rounded = sums.minCoeff() / N;
    const double best = oracles::enumerate_best_min_average(R);
    CHECK(rounded == doctest::Approx(best).epsilon(1e-6));
  }
  CHECK(integral_cases > 20);  // the comparison must actually exercise cases
}

TEST_CASE("negative rates are rejected") {
  Eigen::MatrixXd R(1, 1);
  R << -0.5;
  CHECK_THROWS_AS(solve_association_lp(R), Error);
}
