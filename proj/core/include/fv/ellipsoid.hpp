#pragma once

#include "fv/seminorm.hpp"
#include "fv/types.hpp"

namespace fv {

/// Origin-centered ellipsoid {x : x' A x <= 1}.
struct Ellipsoid {
  Mat A;

  double volume() const {
    return euclidean_ball_volume(int(A.rows())) / std::sqrt(A.determinant());
  }
  /// Shape factor: ellipsoid = sqrt_A_inv * (unit ball).
  Mat sqrt_A() const;
  Ellipsoid polar() const { return {A.inverse()}; }
};

/// Minimum-volume origin-centered ellipsoid containing {+-z_i}:
/// Khachiyan / Wolfe-Atwood barycentric ascent on
///   max log det sum u_i z_i z_i',  u in the simplex,
/// run to the given duality-gap tolerance (max_i z_i' M^-1 z_i <= n(1+tol)).
Ellipsoid loewner_ellipsoid(const std::vector<Vec>& points, double gap_tol = 1e-9,
                            long max_iter = 100000);

/// Maximum-volume origin-centered ellipsoid inside {x : |<h_j,x>| <= 1}.
/// Strong duality turns this max-det problem into the Loewner solve on
/// the facet normals: the optimal shape is the inverse of the Loewner
/// matrix of {+-h_j}.
Ellipsoid john_ellipsoid_of_facets(const std::vector<Vec>& facets, double gap_tol = 1e-9,
                                   long max_iter = 100000);

/// Loewner ellipsoid of the unit ball of s: exact for ellipsoidal
/// representations, Khachiyan on the vertex list for polytopal ones,
/// Khachiyan on a dense boundary sample otherwise (flagged inexact).
struct ExtremalEllipsoid {
  Ellipsoid ellipsoid;
  bool exact = true;  // false when computed from a boundary sample
};
ExtremalEllipsoid loewner_of_ball(const SemiNorm& s, double gap_tol = 1e-9);
ExtremalEllipsoid john_of_ball(const SemiNorm& s, double gap_tol = 1e-9);

}  // namespace fv
