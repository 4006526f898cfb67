#include "fv/geometry.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <numbers>

namespace fv {

std::vector<Vec> direction_grid(int n, int count) {
  if (n < 1) throw std::invalid_argument("direction_grid: dim must be positive");
  if (count <= 0) count = default_direction_count(n);
  std::vector<Vec> dirs;
  dirs.reserve(count);
  if (n == 1) {
    Vec e(1);
    e << 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
    return dirs;
  }
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double t = 2.0 * std::numbers::pi * k / count;
      Vec u(2);
      u << std::cos(t), std::sin(t);
      dirs.push_back(u);
    }
    return dirs;
  }
  if (n == 3) {
    // Fibonacci sphere
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double t = golden * k;
      Vec u(3);
      u << r * std::cos(t), r * std::sin(t), z;
      dirs.push_back(u);
    }
    return dirs;
  }
  // Halton points through the inverse Gaussian map, then normalized.
  auto inv_normal = [](double p) {
    // Acklam-style rational approximation, plenty for grid generation.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    double q, r;
    if (p < plow) {
      q = std::sqrt(-2 * std::log(p));
      return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p > phigh) {
      q = std::sqrt(-2 * std::log(1 - p));
      return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  };
  for (int k = 0; k < count; ++k) {
    Vec u(n);
    for (int j = 0; j < n; ++j) {
      double p = halton(k, halton_prime(j));
      p = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
      u[j] = inv_normal(p);
    }
    const double nn = u.norm();
    if (nn > 1e-12) dirs.push_back(u / nn);
  }
  return dirs;
}

namespace geom {
namespace {

void dedupe(std::vector<Vec>& vs, double tol) {
  std::vector<Vec> out;
  for (const auto& v : vs) {
    bool seen = false;
    for (const auto& w : out) {
      if ((v - w).lpNorm<Eigen::Infinity>() <= tol) { seen = true; break; }
    }
    if (!seen) out.push_back(v);
  }
  vs.swap(out);
}

// Recursive cone-over-facets volume. `points` are the vertices of a
// full-dimensional symmetric-ish convex polytope containing a point
// `center` in its interior.
double volume_rec(const std::vector<Vec>& points, const Vec& center, int n);

double facet_volume(const std::vector<Vec>& facet_points, int n) {
  // (n-1)-dimensional volume of a convex facet given its vertex list.
  if (n == 1) return 1.0;  // a 0-face; never used as a cone base here
  const Vec origin = facet_points[0];
  Mat span(int(origin.size()), int(facet_points.size()) - 1);
  for (size_t i = 1; i < facet_points.size(); ++i) span.col(int(i) - 1) = facet_points[i] - origin;
  Mat B = orthonormal_basis(span);
  if (B.cols() < n - 1) return 0.0;  // degenerate facet
  std::vector<Vec> coords;
  coords.reserve(facet_points.size());
  for (const auto& p : facet_points) coords.push_back(B.transpose() * (p - origin));
  if (n - 1 == 1) {
    double lo = 0, hi = 0;
    for (const auto& c : coords) { lo = std::min(lo, c[0]); hi = std::max(hi, c[0]); }
    return hi - lo;
  }
  Vec c = Vec::Zero(n - 1);
  for (const auto& q : coords) c += q;
  c /= double(coords.size());
  return volume_rec(coords, c, n - 1);
}

double volume_rec(const std::vector<Vec>& points, const Vec& center, int n) {
  if (n == 1) {
    double lo = 0, hi = 0;
    for (const auto& p : points) { lo = std::min(lo, p[0] - center[0]); hi = std::max(hi, p[0] - center[0]); }
    return hi - lo;
  }
  if (n == 2) {
    // Convex polygon: angular sort + shoelace.
    std::vector<Vec> ps = points;
    dedupe(ps, 1e-12);
    std::sort(ps.begin(), ps.end(), [&](const Vec& a, const Vec& b) {
      return std::atan2(a[1] - center[1], a[0] - center[0]) <
             std::atan2(b[1] - center[1], b[0] - center[0]);
    });
    double area = 0.0;
    for (size_t i = 0; i < ps.size(); ++i) {
      const Vec& a = ps[i];
      const Vec& b = ps[(i + 1) % ps.size()];
      area += (a[0] - center[0]) * (b[1] - center[1]) - (b[0] - center[0]) * (a[1] - center[1]);
    }
    return 0.5 * std::abs(area);
  }
  // Shift so the interior point is the origin, enumerate facets, sum cones.
  std::vector<Vec> shifted;
  shifted.reserve(points.size());
  for (const auto& p : points) shifted.push_back(p - center);
  auto facets = facet_enumeration(shifted);
  double vol = 0.0;
  const double scale = [&] {
    double s = 0;
    for (const auto& p : shifted) s = std::max(s, p.lpNorm<Eigen::Infinity>());
    return std::max(s, 1.0);
  }();
  for (const auto& h : facets) {
    std::vector<Vec> on_facet;
    for (const auto& p : shifted) {
      if (std::abs(h.dot(p) - 1.0) <= 1e-9 * scale * std::max(1.0, h.norm())) on_facet.push_back(p);
    }
    if (int(on_facet.size()) < n) continue;
    const double dist = 1.0 / h.norm();
    vol += dist * facet_volume(on_facet, n) / n;
  }
  return vol;
}

}  // namespace

std::vector<Vec> with_reflections(const std::vector<Vec>& points) {
  std::vector<Vec> out = points;
  out.reserve(2 * points.size());
  for (const auto& p : points) out.push_back(-p);
  dedupe(out, 1e-13);
  return out;
}

bool spans(const std::vector<Vec>& points, int n, double tol) {
  if (int(points.size()) < n) return false;
  Mat A(n, int(points.size()));
  for (size_t i = 0; i < points.size(); ++i) A.col(int(i)) = points[i];
  Eigen::JacobiSVD<Mat> svd(A);
  return svd.singularValues()[n - 1] > tol * std::max(1.0, svd.singularValues()[0]);
}

Mat orthonormal_basis(const Mat& A, double tol) {
  if (A.cols() == 0) return Mat(A.rows(), 0);
  Eigen::ColPivHouseholderQR<Mat> qr(A);
  const int r = int(qr.rank());
  Mat Q = qr.householderQ() * Mat::Identity(A.rows(), r);
  (void)tol;
  return Q;
}

std::vector<Vec> facet_enumeration(const std::vector<Vec>& points_in) {
  if (points_in.empty()) throw std::invalid_argument("facet_enumeration: no points");
  const int n = int(points_in[0].size());
  if (n > 4) throw std::invalid_argument("facet_enumeration: exact enumeration supported for n <= 4");
  std::vector<Vec> points = points_in;
  dedupe(points, 1e-13);
  if (!spans(points, n)) throw std::domain_error("facet_enumeration: points do not span R^n");
  const int m = int(points.size());

  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());

  std::vector<Vec> facets;
  std::vector<int> idx(n);
  // iterate over all n-subsets
  std::vector<int> comb(n);
  for (int i = 0; i < n; ++i) comb[i] = i;
  auto advance = [&]() -> bool {
    int i = n - 1;
    while (i >= 0 && comb[i] == m - n + i) --i;
    if (i < 0) return false;
    ++comb[i];
    for (int j = i + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
    return true;
  };
  Mat A(n, n);
  do {
    for (int i = 0; i < n; ++i) A.row(i) = points[comb[i]].transpose();
    Eigen::FullPivLU<Mat> lu(A);
    if (!lu.isInvertible()) continue;
    if (lu.rcond() < 1e-12) continue;
    Vec h = lu.solve(Vec::Ones(n));
    // keep if every point is on the <= 1 side
    const double tol = 1e-9 * std::max(1.0, h.norm() * scale);
    bool valid = true;
    for (const auto& p : points) {
      if (h.dot(p) > 1.0 + tol) { valid = false; break; }
    }
    if (!valid) continue;
    bool seen = false;
    for (const auto& g : facets) {
      if ((g - h).lpNorm<Eigen::Infinity>() <= 1e-8 * std::max(1.0, h.lpNorm<Eigen::Infinity>())) {
        seen = true;
        break;
      }
    }
    if (!seen) facets.push_back(h);
  } while (advance());
  if (facets.empty()) throw std::domain_error("facet_enumeration: no facets found (origin not interior?)");
  return facets;
}

std::vector<Vec> vertex_enumeration(const std::vector<Vec>& facets) {
  return facet_enumeration(with_reflections(facets));
}

double convex_hull_volume(const std::vector<Vec>& points_in) {
  if (points_in.empty()) throw std::invalid_argument("convex_hull_volume: no points");
  const int n = int(points_in[0].size());
  std::vector<Vec> points = points_in;
  dedupe(points, 1e-13);
  if (!spans(points, n)) return 0.0;
  Vec c = Vec::Zero(n);
  for (const auto& p : points) c += p;
  c /= double(points.size());
  return volume_rec(points, c, n);
}

}  // namespace geom
}  // namespace fv
