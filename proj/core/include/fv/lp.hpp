#pragma once

#include "fv/types.hpp"

#include <optional>

namespace fv::lp {

struct Solution {
  Vec x;
  double objective = 0.0;
};

/// Solve  min c'x  s.t.  A x = b,  x >= 0  with a dense two-phase
/// simplex (Bland's rule). Returns nullopt when infeasible; throws
/// SolverError on an unbounded objective or cycling guard trip.
std::optional<Solution> solve_standard_form(const Mat& A, const Vec& b, const Vec& c);

/// Minkowski gauge of conv({+-v_i}) at x:
///   min sum t_i  s.t.  sum t_i w_i = x,  t >= 0,  w in {+-v_i}.
/// Returns +inf when x lies outside the span of the v_i.
double polytope_gauge(const std::vector<Vec>& vertices, const Vec& x);

}  // namespace fv::lp
