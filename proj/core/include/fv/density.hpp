#pragma once

#include "fv/jacobian.hpp"
#include "fv/seminorm.hpp"

#include <functional>

namespace fv {

/// Simple n-vector v_1 ^ ... ^ v_n in an ambient normed R^m, m > n.
struct SimpleVector {
  std::vector<Vec> v;
  SemiNorm ambient;

  int n() const { return int(v.size()); }
  int m() const { return ambient.dim(); }
};

struct DensityValue {
  double value = 0.0;
};

/// Wedge coordinates of v_1 ^ ... ^ v_n as the n x n minors of
/// [v_1 ... v_n] over increasing index tuples.
Vec wedge_coordinates(const std::vector<Vec>& v, int m);

/// phi(v_1 ^ ... ^ v_n): restrict the ambient norm to span(v) through
/// an orthonormal chart, evaluate J^kind of the slice norm and scale
/// by |det| of the coordinates. Zero for dependent vectors.
DensityValue density(const JacobianKind& kind, const SimpleVector& sv,
                     const JacobianOptions& opts = {});

/// Density functional on vector tuples, for the convexity checker.
using DensityFn = std::function<double(const std::vector<Vec>&)>;

DensityFn density_functional(const JacobianKind& kind, const SemiNorm& ambient,
                             const JacobianOptions& opts = {});

/// Circumscribed-Riemannian density modulated by a wedge-coordinate
/// angle; deliberately breaks convexity so the checker's power is
/// testable.
DensityFn nonconvex_control_density(const SemiNorm& ambient, double amplitude = 0.5,
                                    const JacobianOptions& opts = {});

struct ConvexityReport {
  long trials = 0;
  long violations = 0;
  double max_violation = 0.0;     // max over trials of phi(a) - sum_i phi(a_i)
  double tol = 0.0;
  double max_envelope_gap = 0.0;  // m = 3 only: gap to the convexified envelope
  std::vector<std::string> witnesses;
};

/// Sampled semi-ellipticity shadow for n = 2: random simple bivectors
/// split into simple pieces summing to them in wedge coordinates
/// (triangle fans through a random apex, edges subdivided decomp_size
/// times); every trial asserts phi(a) <= sum phi(a_i) + tol. For
/// m = 3 the convexified lower envelope of the induced gauge on
/// Lambda^2 R^3 is also sampled and the max gap reported.
ConvexityReport check_semi_ellipticity(const JacobianKind& kind, const SemiNorm& ambient,
                                       long trials, int decomp_size, std::uint64_t seed,
                                       double tol = 1e-6, const JacobianOptions& opts = {});

ConvexityReport check_semi_ellipticity_fn(const DensityFn& phi, int m, long trials,
                                          int decomp_size, std::uint64_t seed, double tol = 1e-6,
                                          bool sample_envelope = false);

}  // namespace fv
