#ifndef UAVRIS_TYPES_HPP
#define UAVRIS_TYPES_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavris {

/// Horizontal ground-plane coordinate in meters.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Per-slot UAV horizontal positions. points[0] is the fixed start and
/// points[N] must close the loop onto points[0].
struct Trajectory {
  std::vector<Vec2> points;  // size N + 1

  int num_slots() const { return static_cast<int>(points.size()) - 1; }
  const Vec2& at(int n) const { return points.at(static_cast<size_t>(n)); }
  Vec2& at(int n) { return points.at(static_cast<size_t>(n)); }
};

/// RIS element phases, radians in [0, 2*pi], one column per time slot.
struct PhaseSchedule {
  int num_elements = 0;  // M
  int num_slots = 0;     // N
  std::vector<double> theta;  // column-major: theta[m + M*(n-1)] for slot n in 1..N

  PhaseSchedule() = default;
  PhaseSchedule(int m, int n) : num_elements(m), num_slots(n), theta(static_cast<size_t>(m) * n, 0.0) {}

  double& at(int m, int n) { return theta[static_cast<size_t>(m) + static_cast<size_t>(num_elements) * (n - 1)]; }
  double at(int m, int n) const { return theta[static_cast<size_t>(m) + static_cast<size_t>(num_elements) * (n - 1)]; }
  const double* column(int n) const { return theta.data() + static_cast<size_t>(num_elements) * (n - 1); }
  double* column(int n) { return theta.data() + static_cast<size_t>(num_elements) * (n - 1); }
};

/// User association fractions (binary after rounding) and transmit powers,
/// both K x N with slots indexed 1..N.
struct Allocation {
  int num_users = 0;  // K
  int num_slots = 0;  // N
  std::vector<double> assoc;  // a_k[n]
  std::vector<double> power;  // p_k[n], watts

  Allocation() = default;
  Allocation(int k, int n)
      : num_users(k), num_slots(n),
        assoc(static_cast<size_t>(k) * n, 0.0),
        power(static_cast<size_t>(k) * n, 0.0) {}

  size_t idx(int k, int n) const { return static_cast<size_t>(k) + static_cast<size_t>(num_users) * (n - 1); }
  double& a(int k, int n) { return assoc[idx(k, n)]; }
  double a(int k, int n) const { return assoc[idx(k, n)]; }
  double& p(int k, int n) { return power[idx(k, n)]; }
  double p(int k, int n) const { return power[idx(k, n)]; }

  double total_power() const {
    double s = 0.0;
    for (double v : power) s += v;
    return s;
  }
  /// Index of the user served in slot n, or -1 when the slot is silent.
  int served_user(int n, double threshold = 0.5) const {
    for (int k = 0; k < num_users; ++k)
      if (a(k, n) > threshold) return k;
    return -1;
  }
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(what) {}
};

}  // namespace uavris

#endif  // UAVRIS_TYPES_HPP
