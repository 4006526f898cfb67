#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fv {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Determinants / eigenvalues below this count as degenerate.
inline constexpr double kDegTol = 1e-10;

/// Feasibility slack allowed on containment certificates.
inline constexpr double kFeasTol = 1e-8;

/// Thrown when an iterative solver hits its cap without converging.
/// Callers never receive a silently wrong value.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Lebesgue volume of the Euclidean unit ball in R^n.
inline double euclidean_ball_volume(int n) {
  return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Halton sequence entry (index i >= 0) for the given prime base.
inline double halton(std::int64_t i, int base) {
  double f = 1.0, r = 0.0;
  std::int64_t k = i + 1;
  while (k > 0) {
    f /= base;
    r += f * static_cast<double>(k % base);
    k /= base;
  }
  return r;
}

inline int halton_prime(int axis) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  if (axis < 0 || axis >= 8) throw std::invalid_argument("halton axis out of range");
  return primes[axis];
}

/// Deterministic unit-direction grid on S^{n-1}.
///
/// n=2 uses equally spaced angles, n=3 a Fibonacci sphere; higher
/// dimensions fall back to Halton points pushed through the inverse
/// Gaussian map. Counts default to the grid sizes used throughout
/// the numerics (64 in the plane, 266 on the 2-sphere).
std::vector<Vec> direction_grid(int n, int count = 0);

inline int default_direction_count(int n) {
  if (n <= 2) return 64;
  if (n == 3) return 266;
  return 1024;
}

}  // namespace fv
