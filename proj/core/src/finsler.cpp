#include "fv/finsler.hpp"

#include <sstream>

namespace fv {

Atlas validate_atlas(Atlas atlas) {
  if (atlas.charts.empty()) throw std::invalid_argument("atlas: no charts");
  const int n = atlas.charts[0].map.domain_dim();
  const int m = atlas.charts[0].map.target_dim();
  for (const auto& c : atlas.charts) {
    if (c.map.domain_dim() != n || c.map.target_dim() != m)
      throw std::invalid_argument("atlas: charts disagree on dimensions");
    if (c.domain.dim() != n) throw std::invalid_argument("atlas: chart box dimension mismatch");
    if (!(c.bilip_lower > 0) || c.bilip_lower > c.bilip_upper)
      throw std::invalid_argument("atlas: bi-Lipschitz constants need 0 < lower <= upper");
  }
  return atlas;
}

namespace {

// Integral over one chart of weight(p) * J^kind(md_p phi) restricted
// to the indicator and the target predicate.
quad::Result chart_integral(const Chart& chart, const JacobianKind& kind, const BoxUnion& A,
                            int res, const JacobianOptions& opts,
                            const std::function<double(const Vec&)>* weight) {
  const bool constant_md = chart.map.linear_matrix().has_value() && !chart.map.has_norm_field();
  double cached_j = 0.0;
  if (constant_md) {
    const Vec mid = 0.5 * (chart.domain.lo + chart.domain.hi);
    const auto md = metric_differential(chart.map, mid, -1.0, &chart.domain);
    cached_j = jacobian(kind, md.seminorm, opts).value;
  }
  auto integrand = [&](const Vec& p) -> double {
    if (!chart.in_domain(p)) return 0.0;
    if (!A.everything() && !A.contains(chart.map(p))) return 0.0;
    double j;
    if (constant_md) {
      j = cached_j;
    } else {
      try {
        j = jacobian(kind, metric_differential(chart.map, p, -1.0, &chart.domain).seminorm, opts)
                .value;
      } catch (const SolverError& e) {
        std::ostringstream os;
        os << e.what() << " at chart point (";
        for (int i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
        os << ")";
        throw SolverError(os.str());
      }
    }
    return weight ? (*weight)(p)*j : j;
  };
  return quad::integrate(chart.domain, res, integrand);
}

}  // namespace

FinslerVolume finsler_volume(const Atlas& atlas, const JacobianKind& kind, const BoxUnion& A,
                             int quad_points_per_axis, const JacobianOptions& opts) {
  if (atlas.charts.empty()) throw std::invalid_argument("finsler_volume: empty atlas");
  FinslerVolume total;
  for (const auto& chart : atlas.charts) {
    const auto r = chart_integral(chart, kind, A, quad_points_per_axis, opts, nullptr);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
  }
  return total;
}

double chart_independence(const Atlas& a, const Atlas& b, const JacobianKind& kind,
                          const BoxUnion& A, int quad_points_per_axis,
                          const JacobianOptions& opts) {
  const double va = finsler_volume(a, kind, A, quad_points_per_axis, opts).value;
  const double vb = finsler_volume(b, kind, A, quad_points_per_axis, opts).value;
  return std::abs(va - vb) / std::max({std::abs(va), std::abs(vb), 1e-300});
}

namespace detail {
// Shared with the currents module: weighted chart integrals.
quad::Result weighted_chart_integral(const Chart& chart, const JacobianKind& kind,
                                     const BoxUnion& A, int res, const JacobianOptions& opts,
                                     const std::function<double(const Vec&)>& weight) {
  return chart_integral(chart, kind, A, res, opts, &weight);
}
}  // namespace detail

}  // namespace fv
