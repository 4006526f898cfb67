#pragma once

#include "fv/quadrature.hpp"
#include "fv/seminorm.hpp"
#include "fv/types.hpp"

#include <functional>
#include <optional>

namespace fv {

/// Lipschitz map from a Borel subset of R^n into a normed R^m.
/// The target norm may vary with the image point (a Finsler-type
/// field); metric differentials then use the norm at f(p).
class LipschitzMap {
 public:
  using Eval = std::function<Vec(const Vec&)>;
  using NormField = std::function<SemiNorm(const Vec&)>;

  LipschitzMap(int domain_dim, int target_dim, Eval eval, SemiNorm target_norm,
               std::optional<double> declared_lip = std::nullopt);

  static LipschitzMap linear(const Mat& M, SemiNorm target_norm);
  static LipschitzMap identity(SemiNorm target_norm);

  /// Replace the constant target norm by a position-dependent field.
  LipschitzMap with_norm_field(NormField field) const;

  int domain_dim() const { return domain_dim_; }
  int target_dim() const { return target_dim_; }
  Vec operator()(const Vec& p) const { return eval_(p); }
  const SemiNorm& target_norm() const { return target_norm_; }
  SemiNorm target_norm_at(const Vec& x) const { return field_ ? field_(x) : target_norm_; }
  bool has_norm_field() const { return bool(field_); }
  std::optional<double> declared_lip() const { return declared_lip_; }
  std::optional<Mat> linear_matrix() const { return linear_; }

  /// Central finite-difference differential; exact when linear.
  Mat differential(const Vec& p, double h) const;

 private:
  int domain_dim_, target_dim_;
  Eval eval_;
  SemiNorm target_norm_;
  NormField field_;
  std::optional<double> declared_lip_;
  std::optional<Mat> linear_;
};

/// The semi-norm md_p f approximating q -> d(f(p), f(q)) to first
/// order: the target norm pulled back along the differential.
struct MetricDifferential {
  Vec at;
  SemiNorm seminorm;
  Mat differential;
};

/// h <= 0 picks the default step 1e-5 * diam(domain).
MetricDifferential metric_differential(const LipschitzMap& f, const Vec& p, double h = -1.0,
                                       const quad::Box* domain = nullptr);

/// Sampled gauge d(f(p), f(p+h u))/h over a direction grid, for
/// targets that only expose a distance function.
std::vector<std::pair<Vec, double>> metric_differential_sampled(
    const std::function<Vec(const Vec&)>& eval,
    const std::function<double(const Vec&, const Vec&)>& distance, const Vec& p, double h,
    int directions = 0);

/// Both sides of the metric area formula for a linear chart:
///   lhs = integral over A of J^bus(md_p f),
///   rhs = Hausdorff measure of f(A) in the target norm, computed on
///         the image plane as |det(W'M)| Leb(A) * w_n / Leb(B_slice).
struct AreaFormulaCheck {
  double lhs = 0.0, rhs = 0.0, residual = 0.0;
};
AreaFormulaCheck area_formula_check(const LipschitzMap& f, const quad::Box& A,
                                    int quad_points_per_axis = 64);

}  // namespace fv
