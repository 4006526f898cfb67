#include "fv/metric_map.hpp"

#include "fv/geometry.hpp"
#include "fv/jacobian.hpp"

namespace fv {

LipschitzMap::LipschitzMap(int domain_dim, int target_dim, Eval eval, SemiNorm target_norm,
                           std::optional<double> declared_lip)
    : domain_dim_(domain_dim),
      target_dim_(target_dim),
      eval_(std::move(eval)),
      target_norm_(std::move(target_norm)),
      declared_lip_(declared_lip) {
  if (target_norm_.dim() != target_dim_)
    throw std::invalid_argument("LipschitzMap: target norm dimension mismatch");
}

LipschitzMap LipschitzMap::linear(const Mat& M, SemiNorm target_norm) {
  LipschitzMap f(int(M.cols()), int(M.rows()), [M](const Vec& p) { return Vec(M * p); },
                 std::move(target_norm));
  f.linear_ = M;
  return f;
}

LipschitzMap LipschitzMap::identity(SemiNorm target_norm) {
  const int n = target_norm.dim();
  return linear(Mat::Identity(n, n), std::move(target_norm));
}

LipschitzMap LipschitzMap::with_norm_field(NormField field) const {
  LipschitzMap f = *this;
  f.field_ = std::move(field);
  return f;
}

Mat LipschitzMap::differential(const Vec& p, double h) const {
  if (linear_) return *linear_;
  if (!(h > 0)) throw std::invalid_argument("differential: step must be positive");
  Mat D(target_dim_, domain_dim_);
  Vec q = p;
  for (int i = 0; i < domain_dim_; ++i) {
    q[i] = p[i] + h;
    const Vec fp = eval_(q);
    q[i] = p[i] - h;
    const Vec fm = eval_(q);
    q[i] = p[i];
    if (!fp.allFinite() || !fm.allFinite())
      throw std::domain_error("differential: non-finite evaluation");
    D.col(i) = (fp - fm) / (2.0 * h);
  }
  return D;
}

MetricDifferential metric_differential(const LipschitzMap& f, const Vec& p, double h,
                                       const quad::Box* domain) {
  if (int(p.size()) != f.domain_dim())
    throw std::invalid_argument("metric_differential: point dimension mismatch");
  if (domain && !domain->contains(p))
    throw std::invalid_argument("metric_differential: point outside the declared domain");
  if (!(h > 0)) h = 1e-5 * (domain ? std::max(domain->diameter(), 1e-12) : 1.0);
  const Mat D = f.differential(p, h);
  const SemiNorm target = f.target_norm_at(f(p));
  return {p, SemiNorm::pullback_of(target, D), D};
}

std::vector<std::pair<Vec, double>> metric_differential_sampled(
    const std::function<Vec(const Vec&)>& eval,
    const std::function<double(const Vec&, const Vec&)>& distance, const Vec& p, double h,
    int directions) {
  if (!(h > 0)) throw std::invalid_argument("metric_differential_sampled: step must be positive");
  std::vector<std::pair<Vec, double>> gauge;
  const Vec fp = eval(p);
  for (const auto& u : direction_grid(int(p.size()), directions)) {
    gauge.emplace_back(u, distance(fp, eval(p + h * u)) / h);
  }
  return gauge;
}

AreaFormulaCheck area_formula_check(const LipschitzMap& f, const quad::Box& A,
                                    int quad_points_per_axis) {
  const auto M = f.linear_matrix();
  if (!M)
    throw std::invalid_argument(
        "area_formula_check: the Hausdorff side is computed for linear charts only");
  if (f.has_norm_field())
    throw std::invalid_argument("area_formula_check: constant target norms only");

  const JacobianKind bus = JacobianKind::busemann();
  const auto lhs_integrand = [&](const Vec& p) {
    return jacobian(bus, metric_differential(f, p, -1.0, &A).seminorm).value;
  };
  const double lhs = quad::tensor_midpoint(A, quad_points_per_axis, lhs_integrand);

  // Hausdorff measure of the image in the Busemann normalization:
  // Euclidean area of f(A) inside the image plane, scaled by
  // w_n / Leb(unit ball of the restricted norm).
  const int n = f.domain_dim();
  const Mat W = geom::orthonormal_basis(*M);
  if (W.cols() < n) throw std::domain_error("area_formula_check: chart matrix is rank-deficient");
  const double image_area = std::abs((W.transpose() * (*M)).determinant()) * A.volume();
  const SemiNorm slice = SemiNorm::pullback_of(f.target_norm(), W);
  const double rhs = image_area * euclidean_ball_volume(n) / slice.ball_volume().value;

  AreaFormulaCheck c;
  c.lhs = lhs;
  c.rhs = rhs;
  c.residual = std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
  return c;
}

}  // namespace fv
