#include "fv/quadrature.hpp"

namespace fv::quad {

double tensor_midpoint(const Box& box, int points_per_axis,
                       const std::function<double(const Vec&)>& f) {
  const int n = box.dim();
  if (points_per_axis < 1) throw std::invalid_argument("tensor_midpoint: resolution < 1");
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= points_per_axis;
  const Vec h = (box.hi - box.lo) / double(points_per_axis);
  double cell = 1.0;
  for (int i = 0; i < n; ++i) cell *= h[i];

  Vec x(n);
  std::vector<int> idx(n, 0);
  double sum = 0.0;
  for (std::int64_t k = 0; k < total; ++k) {
    for (int i = 0; i < n; ++i) x[i] = box.lo[i] + (idx[i] + 0.5) * h[i];
    const double v = f(x);
    if (!std::isfinite(v)) throw std::domain_error("quadrature: non-finite integrand value");
    sum += v;
    for (int i = 0; i < n; ++i) {
      if (++idx[i] < points_per_axis) break;
      idx[i] = 0;
    }
  }
  return sum * cell;
}

Result integrate(const Box& box, int points_per_axis, const std::function<double(const Vec&)>& f) {
  const int fine = std::max(points_per_axis, 2);
  const int coarse = std::max(fine / 2, 1);
  const double If = tensor_midpoint(box, fine, f);
  const double Ic = tensor_midpoint(box, coarse, f);
  // Midpoint is order 2 on smooth integrands; Richardson gives
  // |I - If| ~ |If - Ic| / 3. Kept as an estimate, not a bound.
  return {If, std::abs(If - Ic) / 3.0};
}

}  // namespace fv::quad
