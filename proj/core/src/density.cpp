#include "fv/density.hpp"

#include "fv/geometry.hpp"

#include <array>
#include <random>
#include <sstream>

namespace fv {

Vec wedge_coordinates(const std::vector<Vec>& v, int m) {
  const int n = int(v.size());
  Mat V(m, n);
  for (int j = 0; j < n; ++j) V.col(j) = v[j];
  // increasing n-tuples of row indices
  std::vector<int> comb(n);
  for (int i = 0; i < n; ++i) comb[i] = i;
  std::vector<double> coords;
  auto advance = [&]() -> bool {
    int i = n - 1;
    while (i >= 0 && comb[i] == m - n + i) --i;
    if (i < 0) return false;
    ++comb[i];
    for (int j = i + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
    return true;
  };
  Mat minor(n, n);
  do {
    for (int i = 0; i < n; ++i) minor.row(i) = V.row(comb[i]);
    coords.push_back(minor.determinant());
  } while (advance());
  return Eigen::Map<Vec>(coords.data(), int(coords.size()));
}

DensityValue density(const JacobianKind& kind, const SimpleVector& sv,
                     const JacobianOptions& opts) {
  const int n = sv.n();
  const int m = sv.m();
  if (m <= n) throw std::invalid_argument("density: ambient dimension must exceed n");
  for (const auto& vi : sv.v) {
    if (int(vi.size()) != m) throw std::invalid_argument("density: vector dimension mismatch");
  }
  Mat V(m, n);
  for (int j = 0; j < n; ++j) V.col(j) = sv.v[j];
  const Mat W = geom::orthonormal_basis(V);
  if (W.cols() < n) return {0.0};  // dependent vectors span a lower-dimensional plane

  const SemiNorm slice = SemiNorm::pullback_of(sv.ambient, W);
  const double J = jacobian(kind, slice, opts).value;
  const double det = (W.transpose() * V).determinant();
  return {J * std::abs(det)};
}

DensityFn density_functional(const JacobianKind& kind, const SemiNorm& ambient,
                             const JacobianOptions& opts) {
  return [kind, ambient, opts](const std::vector<Vec>& v) {
    return density(kind, SimpleVector{v, ambient}, opts).value;
  };
}

DensityFn nonconvex_control_density(const SemiNorm& ambient, double amplitude,
                                    const JacobianOptions& opts) {
  const auto base = density_functional(JacobianKind::circumscribed_riemannian(), ambient, opts);
  const int m = ambient.dim();
  return [base, amplitude, m](const std::vector<Vec>& v) {
    const Vec a = wedge_coordinates(v, m);
    // Even modulation (invariant under a -> -a) of the first two
    // wedge coordinates; the dents break subadditivity.
    const double ang = std::atan2(a[1], a[0]);
    return base(v) * (1.0 + amplitude * std::sin(2.0 * ang));
  };
}

namespace {

// a = v1 ^ v2 decomposed as a fan of triangles over the parallelogram
// boundary through an apex c (not necessarily coplanar): pieces
// 1/2 (p_i - c) ^ (p_{i+1} - c) telescope to the polygon bivector.
std::vector<std::array<Vec, 2>> fan_decomposition(const Vec& v1, const Vec& v2, const Vec& apex,
                                                  int subdiv) {
  std::vector<Vec> poly;
  const Vec zero = Vec::Zero(v1.size());
  auto push_edge = [&](const Vec& a, const Vec& b) {
    for (int k = 0; k < subdiv; ++k) poly.push_back(a + (b - a) * (double(k) / subdiv));
  };
  push_edge(zero, v1);
  push_edge(v1, v1 + v2);
  push_edge(v1 + v2, v2);
  push_edge(v2, zero);
  std::vector<std::array<Vec, 2>> pieces;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec u1 = poly[i] - apex;
    const Vec u2 = poly[(i + 1) % poly.size()] - apex;
    pieces.push_back({u1, 0.5 * u2});
  }
  return pieces;
}

}  // namespace

ConvexityReport check_semi_ellipticity_fn(const DensityFn& phi, int m, long trials,
                                          int decomp_size, std::uint64_t seed, double tol,
                                          bool sample_envelope) {
  if (m < 3) throw std::invalid_argument("check_semi_ellipticity: ambient dimension >= 3");
  ConvexityReport rep;
  rep.tol = tol;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto random_vec = [&]() {
    Vec v(m);
    for (int i = 0; i < m; ++i) v[i] = gauss(rng);
    return v;
  };

  const int subdiv = std::max(1, decomp_size / 4);
  for (long t = 0; t < trials; ++t) {
    const Vec v1 = random_vec(), v2 = random_vec(), apex = random_vec();
    const Vec a = wedge_coordinates({v1, v2}, m);
    if (a.norm() < 1e-8) continue;
    const double lhs = phi({v1, v2});
    double rhs = 0.0;
    for (const auto& piece : fan_decomposition(v1, v2, apex, subdiv))
      rhs += phi({piece[0], piece[1]});
    const double gap = lhs - rhs;
    rep.max_violation = std::max(rep.max_violation, gap);
    ++rep.trials;
    if (gap > tol * std::max(1.0, lhs)) {
      ++rep.violations;
      if (rep.witnesses.size() < 8) {
        std::ostringstream os;
        os << "trial " << t << ": phi(a)=" << lhs << " > sum=" << rhs;
        rep.witnesses.push_back(os.str());
      }
    }
  }

  if (sample_envelope && m == 3) {
    // Lambda^2 R^3 = R^3 and every bivector is simple: push sampled
    // unit bivectors to the boundary of {phi <= 1} and compare with
    // the gauge of their convex hull. Wedge coordinates are ordered
    // (a01, a02, a12); the cross vector of (v1, v2) is (a12, -a02, a01).
    auto cross = [](const Vec& a, const Vec& b) {
      Vec c(3);
      c << a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0];
      return c;
    };
    auto rep_vectors = [&](const Vec& xi) -> std::vector<Vec> {
      Vec c(3);
      c << xi[2], -xi[1], xi[0];
      const Vec chat = c.normalized();
      Vec t = std::abs(chat[0]) < 0.9 ? Vec(Vec::Unit(3, 0)) : Vec(Vec::Unit(3, 1));
      const Vec b1 = cross(chat, t).normalized();
      const Vec b2 = cross(chat, b1);  // b1 x b2 = chat
      return {b1, Vec(c.norm() * b2)};
    };
    std::vector<Vec> boundary;
    for (const auto& u : direction_grid(3, 266)) {
      const double val = phi(rep_vectors(u));
      if (val > 1e-12) boundary.push_back(u / val);
    }
    const auto facets = geom::facet_enumeration(boundary);
    for (const auto& q : boundary) {
      double gauge = 0.0;
      for (const auto& h : facets) gauge = std::max(gauge, h.dot(q));
      rep.max_envelope_gap = std::max(rep.max_envelope_gap, 1.0 - gauge);
    }
  }
  return rep;
}

ConvexityReport check_semi_ellipticity(const JacobianKind& kind, const SemiNorm& ambient,
                                       long trials, int decomp_size, std::uint64_t seed,
                                       double tol, const JacobianOptions& opts) {
  return check_semi_ellipticity_fn(density_functional(kind, ambient, opts), ambient.dim(), trials,
                                   decomp_size, seed, tol, ambient.dim() == 3);
}

}  // namespace fv
