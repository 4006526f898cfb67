#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fv/ellipsoid.hpp"
#include "fv/geometry.hpp"
#include "fv/lp.hpp"
#include "fv/seminorm.hpp"

#include <random>

using namespace fv;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

// Oracle: volume of the lp ball with scales, via the Gamma closed form
//   prod_i (2 c_i Gamma(1+1/p)) / Gamma(1+n/p).
double lp_ball_volume_oracle(double p, const Vec& scales) {
  const int n = int(scales.size());
  double v = 1.0;
  for (int i = 0; i < n; ++i) v *= 2.0 * scales[i];
  if (std::isinf(p)) return v;
  v *= std::pow(std::tgamma(1.0 + 1.0 / p), n) / std::tgamma(1.0 + n / p);
  return v;
}

std::mt19937_64 rng(20240811);

Mat random_invertible(int n, double min_det = 0.2) {
  std::normal_distribution<double> g;
  for (;;) {
    Mat L(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) L(i, j) = g(rng);
    if (std::abs(L.determinant()) > min_det) return L;
  }
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

TEST_CASE("gauge evaluation golden values") {
  CHECK(SemiNorm::euclidean(2)(v2(3, 4)) == doctest::Approx(5.0));
  CHECK(SemiNorm::l1(2)(v2(1, -1)) == doctest::Approx(2.0));

  // cross-polytope gauge via LP equals the l1 closed form
  auto cross = SemiNorm::polytope_vertices({v2(1, 0), v2(0, 1)});
  CHECK(cross(v2(0.5, 0.5)) == doctest::Approx(1.0).epsilon(1e-10));
  std::normal_distribution<double> g;
  for (int k = 0; k < 50; ++k) {
    const Vec x = v2(g(rng), g(rng));
    CHECK(cross(x) == doctest::Approx(SemiNorm::l1(2)(x)).epsilon(1e-9));
  }
}

TEST_CASE("gauge LP agrees with facet form on random polytopes") {
  for (int trial = 0; trial < 10; ++trial) {
    auto s = random_polytope_norm(2 + trial % 2);
    auto facets = s.polytope_facet_form();
    REQUIRE(facets.has_value());
    auto sf = SemiNorm::polytope_facets(*facets);
    std::normal_distribution<double> g;
    for (int k = 0; k < 20; ++k) {
      Vec x(s.dim());
      for (int i = 0; i < s.dim(); ++i) x[i] = g(rng);
      CHECK(s(x) == doctest::Approx(sf(x)).epsilon(1e-8));
    }
  }
}

TEST_CASE("unit ball volumes") {
  CHECK(SemiNorm::euclidean(2).ball_volume().value == doctest::Approx(M_PI).epsilon(1e-12));
  CHECK(SemiNorm::euclidean(2).ball_volume().method == VolumeMethod::exact_ellipsoid);

  const auto sq = SemiNorm::linf(2).ball_volume();
  CHECK(sq.value == doctest::Approx(4.0));
  CHECK(sq.error_bound == 0.0);

  // cross-polytope volume 2^n / n!
  const auto l1v = SemiNorm::l1(3).ball_volume();
  CHECK(l1v.value == doctest::Approx(8.0 / 6.0).epsilon(1e-10));
  CHECK(l1v.method == VolumeMethod::exact_polytope);

  Mat Q = Mat::Zero(2, 2);
  Q(0, 0) = 4;
  Q(1, 1) = 1;
  CHECK(SemiNorm::ellipsoidal(Q).ball_volume().value == doctest::Approx(M_PI / 2).epsilon(1e-12));

  // 4-dimensional cross polytope through the exact enumerator
  CHECK(SemiNorm::l1(4).ball_volume().value == doctest::Approx(16.0 / 24.0).epsilon(1e-9));
}

TEST_CASE("lp quadrature volume matches the Gamma closed form") {
  for (double p : {1.5, 3.0, 4.0}) {
    Vec scales = v2(1.0, 0.7);
    auto s = SemiNorm::lp(p, scales);
    const auto bv = s.ball_volume(1 << 17);
    const double oracle = lp_ball_volume_oracle(p, scales);
    CHECK(bv.method == VolumeMethod::quadrature);
    CHECK(bv.value == doctest::Approx(oracle).epsilon(5e-3));
    CHECK(std::abs(bv.value - oracle) < 5 * bv.error_bound + 1e-4);
  }
}

TEST_CASE("polar duality") {
  // Euclidean is self dual
  auto d = SemiNorm::euclidean(2).polar();
  CHECK(d(v2(3, 4)) == doctest::Approx(5.0));

  // l1 <-> linf
  auto l1d = SemiNorm::l1(2).polar();
  CHECK(l1d(v2(1, -2)) == doctest::Approx(2.0));

  Mat Q = Mat::Zero(2, 2);
  Q(0, 0) = 4;
  Q(1, 1) = 1;
  auto ed = SemiNorm::ellipsoidal(Q).polar();
  auto Qd = ed.ellipsoid_Q();
  REQUIRE(Qd.has_value());
  CHECK((*Qd)(0, 0) == doctest::Approx(0.25));
  CHECK((*Qd)(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("polar of polar agrees on a direction grid") {
  auto check_roundtrip = [](const SemiNorm& s) {
    const auto ss = s.polar().polar();
    for (const auto& u : direction_grid(s.dim(), 64)) {
      CHECK(ss(u) == doctest::Approx(s(u)).epsilon(1e-9));
    }
  };
  check_roundtrip(random_polytope_norm(2));
  check_roundtrip(random_polytope_norm(3));
  Mat L = random_invertible(2);
  check_roundtrip(SemiNorm::ellipsoidal(L.transpose() * L + 0.1 * Mat::Identity(2, 2)));
}

TEST_CASE("pullback golden values") {
  auto e = SemiNorm::euclidean(2);
  auto id = SemiNorm::pullback_of(e, Mat::Identity(2, 2));
  CHECK(id(v2(3, 4)) == doctest::Approx(5.0));

  Mat two = 2.0 * Mat::Identity(2, 2);
  CHECK(SemiNorm::pullback_of(e, two)(v2(1, 0)) == doctest::Approx(2.0));

  // sup-norm pulled back along a rotation by 45 degrees; oracle by
  // dense direction sampling of max(|<r1,x>|, |<r2,x>|)
  const double c = std::sqrt(0.5);
  Mat R(2, 2);
  R << c, -c, c, c;
  auto rot = SemiNorm::pullback_of(SemiNorm::linf(2), R);
  CHECK(rot(v2(1, 0)) == doctest::Approx(c));
  auto oracle = [&](const Vec& x) {
    return std::max(std::abs(R.row(0).dot(x)), std::abs(R.row(1).dot(x)));
  };
  for (const auto& u : direction_grid(2, 128)) {
    CHECK(rot(u) == doctest::Approx(oracle(u)).epsilon(1e-12));
  }
}

TEST_CASE("change of variables: vol(pullback) * |det L| = vol") {
  auto run = [&](const SemiNorm& s) {
    Mat L = random_invertible(s.dim());
    const auto a = SemiNorm::pullback_of(s, L).ball_volume();
    const auto b = s.ball_volume();
    const double lhs = a.value * std::abs(L.determinant());
    CHECK(lhs == doctest::Approx(b.value).epsilon(1e-8 + 20 * (a.error_bound + b.error_bound)));
  };
  run(SemiNorm::euclidean(2));
  run(SemiNorm::l1(3));
  run(random_polytope_norm(2));
  run(random_polytope_norm(3, 9));
  Mat L = random_invertible(3);
  run(SemiNorm::ellipsoidal(L.transpose() * L + 0.2 * Mat::Identity(3, 3)));
}

TEST_CASE("gauge-ball consistency") {
  auto s = random_polytope_norm(2, 8);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const Vec x = v2(U(rng), U(rng));
    const double g = s(x);
    if (std::abs(g - 1.0) < 1e-9) continue;  // boundary
    const bool inside_by_gauge = g <= 1.0;
    // membership oracle via the facet form
    auto H = s.polytope_facet_form();
    bool inside = true;
    for (const auto& h : *H) inside = inside && h.dot(x) <= 1.0 + 1e-12;
    CHECK(inside_by_gauge == inside);
  }
}

TEST_CASE("seminorm axioms hold on samples") {
  CHECK(seminorm_axioms_hold(SemiNorm::l1(3), 200, 7));
  CHECK(seminorm_axioms_hold(random_polytope_norm(2), 100, 8));
  CHECK(seminorm_axioms_hold(SemiNorm::lp(3.0, 2), 200, 9));
}

TEST_CASE("degenerate semi-norms") {
  Mat Q = Mat::Zero(2, 2);
  Q(0, 0) = 1.0;  // zero eigenvalue in the y direction
  auto s = SemiNorm::ellipsoidal(Q);
  CHECK_FALSE(s.is_norm());
  CHECK_THROWS_AS(s.ball_volume(), std::domain_error);
  CHECK_THROWS_AS(s.polar(), std::domain_error);

  // dimension mismatch
  CHECK_THROWS_AS(SemiNorm::euclidean(2)(v3(1, 2, 3)), std::invalid_argument);
}

TEST_CASE("vertex/facet enumeration round trip") {
  // unit square: vertices from the facet description
  auto verts = geom::vertex_enumeration({v2(1, 0), v2(0, 1), v2(-1, 0), v2(0, -1)});
  CHECK(verts.size() == 4);
  double corner = 0;
  for (const auto& v : verts) corner = std::max(corner, v.lpNorm<Eigen::Infinity>());
  CHECK(corner == doctest::Approx(1.0));
  CHECK(geom::convex_hull_volume(verts) == doctest::Approx(4.0));

  // octahedron facets from vertices
  std::vector<Vec> oct = {v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, 1),
                          v3(-1, 0, 0), v3(0, -1, 0), v3(0, 0, -1)};
  auto facets = geom::facet_enumeration(oct);
  CHECK(facets.size() == 8);
  CHECK(geom::convex_hull_volume(oct) == doctest::Approx(8.0 / 6.0));
}

TEST_CASE("loewner and john ellipsoids of classical bodies") {
  // Loewner ellipse of the diamond is the unit disk
  auto diamond = SemiNorm::l1(2);
  auto loew = loewner_of_ball(diamond);
  CHECK(loew.exact);
  CHECK(loew.ellipsoid.volume() == doctest::Approx(M_PI).epsilon(1e-7));
  CHECK((loew.ellipsoid.A - Mat::Identity(2, 2)).norm() < 1e-6);

  // John ellipse of the square is the unit disk
  auto john_sq = john_of_ball(SemiNorm::linf(2));
  CHECK(john_sq.ellipsoid.volume() == doctest::Approx(M_PI).epsilon(1e-7));

  // John ellipse of the diamond: disk of radius sqrt(1/2), area pi/2
  auto john_d = john_of_ball(diamond);
  CHECK(john_d.ellipsoid.volume() == doctest::Approx(M_PI / 2).epsilon(1e-7));
}

TEST_CASE("loewner solver on random symmetric point sets satisfies the support condition") {
  std::normal_distribution<double> g;
  for (int n : {2, 3}) {
    std::vector<Vec> pts;
    for (int k = 0; k < 12; ++k) {
      Vec v(n);
      for (int i = 0; i < n; ++i) v[i] = g(rng);
      pts.push_back(v);
      pts.push_back(-v);
    }
    auto E = loewner_ellipsoid(pts, 1e-10);
    double worst = 0.0;
    for (const auto& p : pts) worst = std::max(worst, p.dot(E.A * p));
    CHECK(worst <= 1.0 + 1e-8);   // containment
    CHECK(worst >= 1.0 - 1e-6);   // support points touch
  }
}
