#include "fv/ellipsoid.hpp"

#include "fv/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

namespace fv {

Mat Ellipsoid::sqrt_A() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  return es.operatorSqrt();
}

Ellipsoid loewner_ellipsoid(const std::vector<Vec>& points, double gap_tol, long max_iter) {
  if (points.empty()) throw std::invalid_argument("loewner: no points");
  const int n = int(points[0].size());
  const int m = int(points.size());
  if (!geom::spans(points, n))
    throw std::domain_error("loewner: points do not span R^n, ellipsoid degenerate");

  Mat Z(n, m);
  for (int j = 0; j < m; ++j) Z.col(j) = points[j];

  Vec u = Vec::Constant(m, 1.0 / m);
  Mat M = Z * u.asDiagonal() * Z.transpose();
  Mat Minv = M.inverse();
  Vec kappa(m);
  auto full_recompute = [&]() {
    M = Z * u.asDiagonal() * Z.transpose();
    Minv = M.inverse();
    for (int j = 0; j < m; ++j) kappa[j] = Z.col(j).dot(Minv * Z.col(j));
  };
  full_recompute();

  for (long it = 0; it < max_iter; ++it) {
    int jmax = 0, jmin = -1;
    double kmax = -1.0, kmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
      if (kappa[j] > kmax) { kmax = kappa[j]; jmax = j; }
      if (u[j] > 1e-14 && kappa[j] < kmin) { kmin = kappa[j]; jmin = j; }
    }
    const bool add_ok = kmax > n * (1.0 + gap_tol);
    const bool drop_ok = jmin >= 0 && kmin < n * (1.0 - gap_tol);
    if (!add_ok && !drop_ok) return {Minv / double(n)};

    // Wolfe-Atwood: alternate Frank-Wolfe add steps with away (drop)
    // steps; the exact line maximum of log det along u -> (1-b)u + b e_j
    // is b* = (kappa - n) / (n (kappa - 1)).
    int j;
    double beta;
    if (!drop_ok || (add_ok && (kmax - n) >= (n - kmin))) {
      j = jmax;
      beta = std::min((kappa[j] - n) / (n * (kappa[j] - 1.0)), 1.0 - 1e-12);
    } else {
      j = jmin;
      const double beta_min = -u[j] / std::max(1.0 - u[j], 1e-300);
      if (kappa[j] > 1.0 + 1e-14) {
        beta = std::clamp((kappa[j] - n) / (n * (kappa[j] - 1.0)), beta_min, 0.0);
      } else {
        beta = beta_min;  // objective decreasing on the whole segment
      }
    }
    u *= (1.0 - beta);
    u[j] += beta;

    if ((it + 1) % 512 == 0) {
      full_recompute();
      continue;
    }
    // Sherman-Morrison update of M^{-1} and the kappa values.
    const Vec w = Minv * Z.col(j);
    const double denom = (1.0 - beta) + beta * kappa[j];
    if (denom <= 1e-14 || beta <= -1.0 + 1e-14) {
      full_recompute();
      continue;
    }
    Minv = (Minv - (beta / denom) * (w * w.transpose())) / (1.0 - beta);
    const Vec zw = Z.transpose() * w;
    kappa = (kappa - (beta / denom) * zw.cwiseProduct(zw).eval()) / (1.0 - beta);
  }
  throw SolverError("loewner: iteration cap reached before gap tolerance");
}

Ellipsoid john_ellipsoid_of_facets(const std::vector<Vec>& facets, double gap_tol, long max_iter) {
  // max log det B s.t. h' B h <= 1 has KKT solution B = (n M(u*))^{-1}
  // with u* the Loewner weights of the normal set, so the inscribed
  // shape matrix is the inverse of the Loewner matrix of {+-h_j}.
  Ellipsoid outer = loewner_ellipsoid(facets, gap_tol, max_iter);
  return {outer.A.inverse()};
}

ExtremalEllipsoid loewner_of_ball(const SemiNorm& s, double gap_tol) {
  if (auto Q = s.ellipsoid_Q()) return {{*Q}, true};
  if (auto V = s.polytope_vertex_form()) return {loewner_ellipsoid(*V, gap_tol), true};
  return {loewner_ellipsoid(s.boundary_sample(4 * default_direction_count(s.dim())), gap_tol),
          false};
}

ExtremalEllipsoid john_of_ball(const SemiNorm& s, double gap_tol) {
  if (auto Q = s.ellipsoid_Q()) return {{*Q}, true};
  if (auto H = s.polytope_facet_form()) return {john_ellipsoid_of_facets(*H, gap_tol), true};
  // Sampled fallback: John(B_s) is the polar of the Loewner ellipsoid
  // of the polar ball.
  const SemiNorm dual = s.polar();
  auto outer =
      loewner_ellipsoid(dual.boundary_sample(4 * default_direction_count(s.dim())), gap_tol);
  return {outer.polar(), false};
}

}  // namespace fv
