#pragma once

#include "fv/types.hpp"

namespace fv::geom {

/// Facet functionals of conv(points): h with <h,p> <= 1 for all points
/// and equality on at least n affinely independent ones. The input is
/// expected to be a symmetric point set spanning R^n, so every facet
/// hyperplane has the form {<h,x> = 1}. Brute-force over n-subsets;
/// intended for n <= 4 at desk scale.
std::vector<Vec> facet_enumeration(const std::vector<Vec>& points);

/// Vertices of {x : |<h_j,x>| <= 1} for a spanning symmetric facet
/// family. By polarity this is facet_enumeration of {+-h_j}.
std::vector<Vec> vertex_enumeration(const std::vector<Vec>& facets);

/// Exact Lebesgue volume of conv(points) in R^n (n <= 4): cone
/// decomposition over enumerated facets, recursing on facet polytopes.
double convex_hull_volume(const std::vector<Vec>& points);

/// Orthonormal basis of span(cols of A) as columns (thin Q factor).
Mat orthonormal_basis(const Mat& A, double tol = kDegTol);

/// True when the point set spans R^n (smallest singular value test).
bool spans(const std::vector<Vec>& points, int n, double tol = kDegTol);

/// Append the reflections -p of every point.
std::vector<Vec> with_reflections(const std::vector<Vec>& points);

}  // namespace fv::geom
