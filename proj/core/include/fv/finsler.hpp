#pragma once

#include "fv/jacobian.hpp"
#include "fv/metric_map.hpp"
#include "fv/quadrature.hpp"

namespace fv {

/// Finite union of axis-aligned boxes; an empty list means "everything".
struct BoxUnion {
  std::vector<quad::Box> boxes;

  bool everything() const { return boxes.empty(); }
  bool contains(const Vec& x) const {
    if (boxes.empty()) return true;
    for (const auto& b : boxes) {
      if (b.contains(x)) return true;
    }
    return false;
  }
  static BoxUnion all() { return {}; }
  static BoxUnion single(quad::Box b) { return {{std::move(b)}}; }
};

/// One bi-Lipschitz parametrization piece: a box-clipped compact
/// domain and a Lipschitz chart map into a normed target.
struct Chart {
  quad::Box domain;
  std::function<bool(const Vec&)> indicator;  // optional clip inside the box
  LipschitzMap map;
  double bilip_lower = 1.0;  // user-declared constants
  double bilip_upper = 1.0;

  bool in_domain(const Vec& p) const { return !indicator || indicator(p); }
};

struct Atlas {
  std::vector<Chart> charts;

  int domain_dim() const { return charts.at(0).map.domain_dim(); }
  int target_dim() const { return charts.at(0).map.target_dim(); }
};

Atlas validate_atlas(Atlas atlas);

struct FinslerVolume {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// mu_S^kind(A) = sum over charts of the integral of
/// J^kind(md_p phi) over K cap phi^{-1}(A), by tensor midpoint
/// quadrature with a two-level error estimate. Constant-differential
/// charts (linear maps into a fixed norm) evaluate one Jacobian.
FinslerVolume finsler_volume(const Atlas& atlas, const JacobianKind& kind, const BoxUnion& A,
                             int quad_points_per_axis = 128, const JacobianOptions& opts = {});

/// Relative difference of the volumes computed through two atlases
/// presenting the same set.
double chart_independence(const Atlas& a, const Atlas& b, const JacobianKind& kind,
                          const BoxUnion& A, int quad_points_per_axis = 128,
                          const JacobianOptions& opts = {});

namespace detail {
quad::Result weighted_chart_integral(const Chart& chart, const JacobianKind& kind,
                                     const BoxUnion& A, int res, const JacobianOptions& opts,
                                     const std::function<double(const Vec&)>& weight);
}

}  // namespace fv
