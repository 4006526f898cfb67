#pragma once

#include "fv/types.hpp"

#include <functional>

namespace fv::quad {

/// Axis-aligned box prod_i [lo_i, hi_i].
struct Box {
  Vec lo, hi;

  int dim() const { return int(lo.size()); }
  double volume() const {
    double v = 1.0;
    for (int i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
  }
  double diameter() const { return (hi - lo).norm(); }
  bool contains(const Vec& x, double slack = 0.0) const {
    for (int i = 0; i < lo.size(); ++i) {
      if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    }
    return true;
  }
  static Box unit(int n) { return {Vec::Zero(n), Vec::Ones(n)}; }
};

struct Result {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Midpoint tensor rule with `points_per_axis` cells per axis,
/// accumulated in a fixed deterministic order.
double tensor_midpoint(const Box& box, int points_per_axis,
                       const std::function<double(const Vec&)>& f);

/// Midpoint rule at full and half resolution with a Richardson-style
/// error estimate from the two levels.
Result integrate(const Box& box, int points_per_axis, const std::function<double(const Vec&)>& f);

}  // namespace fv::quad
