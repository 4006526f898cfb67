#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fv/finsler.hpp"

#include <random>

using namespace fv;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

quad::Box unit_box(int n) { return quad::Box::unit(n); }

std::mt19937_64 rng(424242);

Mat random_matrix(int rows, int cols) {
  std::normal_distribution<double> g;
  Mat M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = g(rng);
  return M;
}

SemiNorm random_polytope_norm(int n, int verts = 7) {
  std::normal_distribution<double> g;
  std::vector<Vec> V;
  for (int k = 0; k < verts; ++k) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    V.push_back(v.normalized() * (0.5 + std::abs(g(rng))));
  }
  return SemiNorm::polytope_vertices(V);
}

}  // namespace

TEST_CASE("metric differential of a linear map is exact") {
  const Mat A = random_matrix(3, 2);
  auto f = LipschitzMap::linear(A, SemiNorm::euclidean(3));
  const auto md = metric_differential(f, v2(0.3, 0.7));
  for (const auto& u : direction_grid(2, 32)) {
    CHECK(md.seminorm(u) == doctest::Approx((A * u).norm()).epsilon(1e-12));
  }
}

TEST_CASE("identity into l1 has md = l1 everywhere") {
  auto f = LipschitzMap::identity(SemiNorm::l1(2));
  for (const Vec& p : {v2(0.1, 0.2), v2(0.9, 0.4)}) {
    const auto md = metric_differential(f, p);
    for (const auto& u : direction_grid(2, 16))
      CHECK(md.seminorm(u) == doctest::Approx(SemiNorm::l1(2)(u)).epsilon(1e-12));
  }
}

TEST_CASE("finite differences recover the hand derivative of (x^2, y)") {
  auto f = LipschitzMap(2, 2,
                        [](const Vec& p) {
                          Vec y(2);
                          y << p[0] * p[0], p[1];
                          return y;
                        },
                        SemiNorm::euclidean(2));
  const auto md = metric_differential(f, v2(1.0, 0.0), 1e-4);
  CHECK(md.seminorm(v2(1, 0)) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(md.seminorm(v2(0, 1)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("chain rule md_p(f o L) = (md_{Lp} f) o L for linear L") {
  const Mat L = random_matrix(2, 2) + 2.0 * Mat::Identity(2, 2);
  auto f = LipschitzMap(2, 2,
                        [](const Vec& p) {
                          Vec y(2);
                          y << std::sin(p[0]) + p[1], p[0] * p[1];
                          return y;
                        },
                        SemiNorm::l1(2));
  auto fL = LipschitzMap(2, 2, [&](const Vec& p) { return f(Vec(L * p)); },
                         SemiNorm::l1(2));
  const Vec p = v2(0.25, -0.35);
  const auto lhs = metric_differential(fL, p, 1e-5);
  const auto rhs = metric_differential(f, Vec(L * p), 1e-5);
  for (const auto& u : direction_grid(2, 32)) {
    CHECK(lhs.seminorm(u) == doctest::Approx(rhs.seminorm(L * u)).epsilon(1e-5));
  }
}

TEST_CASE("bi-Lipschitz bounds sandwich the metric differential") {
  // f = R * diag(1.4, 0.8): bi-Lipschitz with constants (0.8, 1.4)
  Mat R(2, 2);
  const double t = 0.6;
  R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  Mat D = Mat::Zero(2, 2);
  D(0, 0) = 1.4;
  D(1, 1) = 0.8;
  auto f = LipschitzMap::linear(R * D, SemiNorm::euclidean(2));
  const auto md = metric_differential(f, v2(0.5, 0.5));
  for (const auto& u : direction_grid(2, 64)) {
    CHECK(md.seminorm(u) >= 0.8 - 1e-12);
    CHECK(md.seminorm(u) <= 1.4 + 1e-12);
  }
}

TEST_CASE("area formula on golden linear charts") {
  // identity on [0,1]^2 into linf: both sides are the Busemann
  // measure of the unit square, pi/4
  auto id_linf = LipschitzMap::identity(SemiNorm::linf(2));
  auto c1 = area_formula_check(id_linf, unit_box(2), 16);
  CHECK(c1.lhs == doctest::Approx(M_PI / 4).epsilon(1e-9));
  CHECK(c1.residual <= 1e-9);

  // doubling map, Euclidean target: area 4
  auto dbl = LipschitzMap::linear(2.0 * Mat::Identity(2, 2), SemiNorm::euclidean(2));
  auto c2 = area_formula_check(dbl, unit_box(2), 8);
  CHECK(c2.lhs == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(c2.residual <= 1e-12);

  // unimodular shear keeps area 1
  Mat S(2, 2);
  S << 1, 1, 0, 1;
  auto shear = LipschitzMap::linear(S, SemiNorm::euclidean(2));
  auto c3 = area_formula_check(shear, unit_box(2), 8);
  CHECK(c3.lhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c3.residual <= 1e-12);
}

TEST_CASE("area formula on random linear charts into R^3") {
  for (int trial = 0; trial < 5; ++trial) {
    Mat A = random_matrix(3, 2);
    while (std::abs((A.transpose() * A).determinant()) < 0.1) A = random_matrix(3, 2);
    const SemiNorm target = (trial % 2) ? SemiNorm::l1(3) : random_polytope_norm(3, 6);
    auto f = LipschitzMap::linear(A, target);
    const auto c = area_formula_check(f, unit_box(2), 4);
    CHECK(c.residual <= 1e-6);
  }
}

TEST_CASE("finsler volume golden values") {
  Atlas square{{Chart{unit_box(2), nullptr, LipschitzMap::identity(SemiNorm::linf(2)), 1, 1}}};
  CHECK(finsler_volume(square, JacobianKind::mass_star(), BoxUnion::all(), 32).value ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(finsler_volume(square, JacobianKind::busemann(), BoxUnion::all(), 32).value ==
        doctest::Approx(M_PI / 4).epsilon(1e-9));

  Atlas tripled{{Chart{unit_box(2), nullptr,
                       LipschitzMap::linear(3.0 * Mat::Identity(2, 2), SemiNorm::euclidean(2)), 3,
                       3}}};
  CHECK(finsler_volume(tripled, JacobianKind::circumscribed_riemannian(), BoxUnion::all(), 32)
            .value == doctest::Approx(9.0).epsilon(1e-9));
}

TEST_CASE("chart independence") {
  const auto kind = JacobianKind::busemann();
  // identity vs two half boxes
  Atlas whole{{Chart{unit_box(2), nullptr, LipschitzMap::identity(SemiNorm::l1(2)), 1, 1}}};
  Vec mid_lo = v2(0, 0), mid_hi = v2(0.5, 1), hi = v2(1, 1), half_lo = v2(0.5, 0);
  Atlas halves{{Chart{{mid_lo, mid_hi}, nullptr, LipschitzMap::identity(SemiNorm::l1(2)), 1, 1},
                Chart{{half_lo, hi}, nullptr, LipschitzMap::identity(SemiNorm::l1(2)), 1, 1}}};
  CHECK(chart_independence(whole, halves, kind, BoxUnion::all(), 64) <= 1e-9);

  // identity vs the reparametrization x -> (x^2+x)/2 on [0,1]
  auto warp = LipschitzMap(2, 2,
                           [](const Vec& p) {
                             Vec y(2);
                             y << 0.5 * (p[0] * p[0] + p[0]), p[1];
                             return y;
                           },
                           SemiNorm::euclidean(2));
  Atlas warped{{Chart{unit_box(2), nullptr, warp, 0.5, 1.5}}};
  Atlas straight{{Chart{unit_box(2), nullptr, LipschitzMap::identity(SemiNorm::euclidean(2)), 1, 1}}};
  CHECK(chart_independence(straight, warped, kind, BoxUnion::all(), 128) <= 1e-3);

  // axis-aligned vs rotated polar charts of the unit disk
  auto polar_chart = [](double angle_offset) {
    return LipschitzMap(2, 2,
                        [angle_offset](const Vec& p) {
                          Vec y(2);
                          y << p[0] * std::cos(p[1] + angle_offset),
                              p[0] * std::sin(p[1] + angle_offset);
                          return y;
                        },
                        SemiNorm::euclidean(2));
  };
  quad::Box polar_box{v2(0, 0), v2(1, 2 * M_PI)};
  Atlas axis{{Chart{polar_box, nullptr, polar_chart(0.0), 0.01, 1}}};
  Atlas rotated{{Chart{polar_box, nullptr, polar_chart(0.7), 0.01, 1}}};
  const double va =
      finsler_volume(axis, JacobianKind::circumscribed_riemannian(), BoxUnion::all(), 128).value;
  CHECK(va == doctest::Approx(M_PI).epsilon(1e-4));
  CHECK(chart_independence(axis, rotated, JacobianKind::circumscribed_riemannian(),
                           BoxUnion::all(), 128) <= 1e-3);
}

TEST_CASE("banach slice: volume = J * Leb(box)") {
  for (int trial = 0; trial < 4; ++trial) {
    const auto s = (trial % 2) ? random_polytope_norm(2) : SemiNorm::l1(2);
    Atlas slice{{Chart{unit_box(2), nullptr, LipschitzMap::identity(s), 1, 1}}};
    for (auto kind : {JacobianKind::busemann(), JacobianKind::mass_star(),
                      JacobianKind::circumscribed_riemannian()}) {
      const double vol = finsler_volume(slice, kind, BoxUnion::all(), 16).value;
      const double J = jacobian(kind, s).value;
      CHECK(vol == doctest::Approx(J).epsilon(1e-9));
    }
  }
}

TEST_CASE("volume non-increasing under linear contractions") {
  // property (*): F with operator norm <= 1 between normed targets
  for (int trial = 0; trial < 6; ++trial) {
    const SemiNorm src = random_polytope_norm(2, 6);
    const SemiNorm dst = random_polytope_norm(2, 6);
    Mat F = random_matrix(2, 2);
    // exact operator norm via vertices of the source ball
    const auto src_verts = *src.polytope_vertex_form();
    double opn = 0.0;
    for (const auto& v : src_verts) opn = std::max(opn, dst(F * v));
    if (opn < 1e-9) continue;
    F /= opn * 1.0000001;

    Atlas source{{Chart{unit_box(2), nullptr, LipschitzMap::identity(src), 1, 1}}};
    Atlas image{{Chart{unit_box(2), nullptr, LipschitzMap::linear(F, dst), 0.01, 10}}};
    for (auto kind : {JacobianKind::busemann(), JacobianKind::mass_star(),
                      JacobianKind::circumscribed_riemannian()}) {
      const double vs = finsler_volume(source, kind, BoxUnion::all(), 8).value;
      const double vi = finsler_volume(image, kind, BoxUnion::all(), 8).value;
      CHECK(vi <= vs * (1 + 1e-9) + 1e-12);
    }
  }
}

TEST_CASE("target predicate restricts the integral") {
  Atlas square{{Chart{unit_box(2), nullptr, LipschitzMap::identity(SemiNorm::euclidean(2)), 1, 1}}};
  BoxUnion left = BoxUnion::single({v2(0, 0), v2(0.5, 1)});
  CHECK(finsler_volume(square, JacobianKind::circumscribed_riemannian(), left, 64).value ==
        doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("position-dependent norm field integrates pointwise jacobians") {
  // Finsler structure Phi(x, v) = |diag(1+x_0, 1) v|_2: J^cr at x is
  // sqrt(det Q(x)) = 1 + x_0, so the mass of the unit square is 3/2.
  auto field = [](const Vec& x) {
    Mat Q = Mat::Identity(2, 2);
    Q(0, 0) = (1.0 + x[0]) * (1.0 + x[0]);
    return SemiNorm::ellipsoidal(Q);
  };
  auto f = LipschitzMap::identity(SemiNorm::euclidean(2)).with_norm_field(field);
  Atlas atlas{{Chart{unit_box(2), nullptr, f, 1, 2}}};
  const auto v = finsler_volume(atlas, JacobianKind::circumscribed_riemannian(), BoxUnion::all(), 64);
  CHECK(v.value == doctest::Approx(1.5).epsilon(1e-6));
}
