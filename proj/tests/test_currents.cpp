#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fv/current.hpp"

#include <random>

using namespace fv;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

std::mt19937_64 rng(90210);

Mat random_invertible(int n, double min_det = 0.3) {
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

// unit-square current with multiplicity theta in a normed plane
DeskCurrent square_current(SemiNorm target, SemiNorm sigma, double theta = 1.0) {
  Atlas atlas{{Chart{quad::Box::unit(2), nullptr, LipschitzMap::identity(std::move(target)), 1, 1}}};
  return validate_current({std::move(atlas), {Multiplicity::constant(theta)}, std::move(sigma)});
}

DeskCurrent linear_chart_current(const Mat& M, SemiNorm target, SemiNorm sigma) {
  Atlas atlas{{Chart{quad::Box::unit(2), nullptr, LipschitzMap::linear(M, std::move(target)), 0.1,
                     10.0}}};
  return validate_current({std::move(atlas), {Multiplicity::constant(1.0)}, std::move(sigma)});
}

}  // namespace

TEST_CASE("evaluate golden values") {
  auto T = square_current(SemiNorm::euclidean(2), SemiNorm::euclidean(2));
  TestForm area{ScalarSpec::constant(1.0), MapSpec::identity(2), std::nullopt};
  CHECK(evaluate(T, area, 32) == doctest::Approx(1.0).epsilon(1e-12));

  // pi with a constant coordinate kills the evaluation (locality)
  Mat P = Mat::Zero(2, 2);
  P(0, 0) = 1.0;  // second coordinate constant 0
  TestForm degenerate{ScalarSpec::constant(1.0), MapSpec::linear(P), std::nullopt};
  CHECK(evaluate(T, degenerate, 16) == doctest::Approx(0.0));

  auto Tneg = square_current(SemiNorm::euclidean(2), SemiNorm::euclidean(2), -1.0);
  CHECK(evaluate(Tneg, area, 16) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("lipschitz norm golden values") {
  const auto box = quad::Box::unit(2);
  // identity, l2 -> l2
  CHECK(lipschitz_norm(MapSpec::identity(2), SemiNorm::euclidean(2), SemiNorm::euclidean(2),
                       box) == doctest::Approx(1.0));

  // linear F from l1 source into linf sigma: max over diamond vertices
  const Mat F = random_invertible(2);
  const double expected = std::max(
      {SemiNorm::linf(2)(F * v2(1, 0)), SemiNorm::linf(2)(F * v2(0, 1)),
       SemiNorm::linf(2)(F * v2(-1, 0)), SemiNorm::linf(2)(F * v2(0, -1))});
  CHECK(lipschitz_norm(MapSpec::linear(F), SemiNorm::linf(2), SemiNorm::l1(2), box) ==
        doctest::Approx(expected).epsilon(1e-12));

  // coordinatewise 2-Lipschitz map into linf: L^inf = max coordinate Lip
  Mat D = Mat::Zero(2, 2);
  D(0, 0) = 2.0;
  D(1, 1) = 1.0;
  CHECK(lipschitz_norm(MapSpec::linear(D), SemiNorm::linf(2), SemiNorm::euclidean(2), box) ==
        doctest::Approx(2.0));
}

TEST_CASE("mass_by_formula golden values") {
  // identity chart into (R^2, l1), sigma = linf: J^{m*}(l1) = 2
  auto T1 = square_current(SemiNorm::l1(2), SemiNorm::linf(2));
  CHECK(mass_by_formula(T1, BoxUnion::all(), 16).value == doctest::Approx(2.0).epsilon(1e-9));

  // same chart, sigma = l2: J^{cr}(l1) = 1
  auto T2 = square_current(SemiNorm::l1(2), SemiNorm::euclidean(2));
  CHECK(mass_by_formula(T2, BoxUnion::all(), 16).value == doctest::Approx(1.0).epsilon(1e-7));

  // euclidean everywhere: mass = Leb(A)
  auto T3 = square_current(SemiNorm::euclidean(2), SemiNorm::euclidean(2));
  BoxUnion strip = BoxUnion::single({v2(0, 0), v2(0.25, 1)});
  CHECK(mass_by_formula(T3, strip, 64).value == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("duality: optimal test map attains the formula mass") {
  for (int trial = 0; trial < 4; ++trial) {
    const SemiNorm target = random_polytope_norm(2, 6);
    const SemiNorm sigma = (trial % 2) ? SemiNorm::linf(2) : SemiNorm::euclidean(2);
    const Mat M = random_invertible(2);
    auto T = linear_chart_current(M, target, sigma);
    const double formula = mass_by_formula(T, BoxUnion::all(), 32).value;
    const auto pistar = optimal_test_map(T);
    const auto dual = mass_by_duality(T, BoxUnion::all(), 2, {pistar}, 32);
    CHECK(dual.value == doctest::Approx(formula).epsilon(1e-3));
    CHECK(dual.value <= formula * (1 + 1e-3));
  }
}

TEST_CASE("duality: zero map contributes nothing, random candidates stay below") {
  auto T = square_current(SemiNorm::l1(2), SemiNorm::linf(2));
  const double formula = mass_by_formula(T, BoxUnion::all(), 32).value;

  const auto zero = MapSpec::linear(Mat::Zero(2, 2));
  CHECK(mass_by_duality(T, BoxUnion::all(), 2, {zero}, 16).value == doctest::Approx(0.0));

  std::vector<MapSpec> randoms;
  for (int k = 0; k < 6; ++k) randoms.push_back(MapSpec::linear(random_invertible(2)));
  const auto dual = mass_by_duality(T, BoxUnion::all(), 2, randoms, 32);
  CHECK(dual.value <= formula * (1 + 1e-3));
  CHECK(dual.value > 0.0);
}

TEST_CASE("compare_masses on golden currents") {
  // euclidean identity current: m_2 = Leb = 1, all chains hold
  auto T = square_current(SemiNorm::euclidean(2), SemiNorm::euclidean(2));
  auto c = compare_masses(T, BoxUnion::all(), 32);
  CHECK(c.m_2 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(c.chain_l2_ok);
  CHECK(c.chain_linf_ok);

  // l1-target square current: m_2 = 1, m_inf = 2 <= 4 * 1
  auto T1 = square_current(SemiNorm::l1(2), SemiNorm::linf(2));
  auto c1 = compare_masses(T1, BoxUnion::all(), 32);
  CHECK(c1.m_2 == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(c1.m_inf == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(c1.chain_l2_ok);
  CHECK(c1.chain_linf_ok);
}

TEST_CASE("compare_masses over random currents") {
  for (int trial = 0; trial < 10; ++trial) {
    const Mat L = random_invertible(2);
    const SemiNorm target = (trial % 2) ? random_polytope_norm(2, 6)
                                        : SemiNorm::ellipsoidal(L.transpose() * L +
                                                                0.2 * Mat::Identity(2, 2));
    const SemiNorm sigma = (trial % 3) ? SemiNorm(random_polytope_norm(2, 5)) : SemiNorm::l1(2);
    auto T = linear_chart_current(random_invertible(2), target, sigma);
    const auto c = compare_masses(T, BoxUnion::all(), 16);
    CHECK(c.chain_l2_ok);
    CHECK(c.chain_linf_ok);
  }
}

TEST_CASE("pushforward") {
  auto T = square_current(SemiNorm::euclidean(2), SemiNorm::euclidean(2));
  TestForm area{ScalarSpec::constant(1.0), MapSpec::identity(2), std::nullopt};

  // identity pushforward leaves evaluation unchanged
  auto Tid = pushforward(T, MapSpec::identity(2), SemiNorm::euclidean(2));
  CHECK(evaluate(Tid, area, 16) == doctest::Approx(evaluate(T, area, 16)).epsilon(1e-12));

  // doubling scales the mass by 4 = det
  auto T2 = pushforward(T, MapSpec::linear(2.0 * Mat::Identity(2, 2)), SemiNorm::euclidean(2));
  CHECK(mass_by_formula(T2, BoxUnion::all(), 16).value == doctest::Approx(4.0).epsilon(1e-9));

  // shear with det 1: mass recomputed through the Loewner route stays 1
  Mat S(2, 2);
  S << 1, 1, 0, 1;
  auto Ts = pushforward(T, MapSpec::linear(S), SemiNorm::euclidean(2));
  CHECK(mass_by_formula(Ts, BoxUnion::all(), 16).value == doctest::Approx(1.0).epsilon(1e-7));

  // functoriality on forms: push(T)(f, pi) = T(f o g, pi o g)
  Mat G = random_invertible(2);
  auto Tg = pushforward(T, MapSpec::linear(G), SemiNorm::euclidean(2));
  TestForm w{ScalarSpec::constant(1.0), MapSpec::linear(random_invertible(2)), std::nullopt};
  TestForm composed{ScalarSpec::constant(1.0), w.pi.after(MapSpec::linear(G)), std::nullopt};
  CHECK(evaluate(Tg, w, 32) == doctest::Approx(evaluate(T, composed, 32)).epsilon(1e-9));

  // mass bound: mass(g_# T) <= Lip(g)^n * mass(T)
  const double lip = lipschitz_norm(MapSpec::linear(G), SemiNorm::euclidean(2),
                                    SemiNorm::euclidean(2), quad::Box::unit(2));
  CHECK(mass_by_formula(Tg, BoxUnion::all(), 16).value <=
        std::pow(lip, 2) * mass_by_formula(T, BoxUnion::all(), 16).value * (1 + 1e-9));
}

TEST_CASE("restrict") {
  auto T = square_current(SemiNorm::euclidean(2), SemiNorm::euclidean(2));
  TestForm area{ScalarSpec::constant(1.0), MapSpec::identity(2), std::nullopt};

  // A = everything
  auto Tall = restrict(T, BoxUnion::all());
  CHECK(evaluate(Tall, area, 32) == doctest::Approx(evaluate(T, area, 32)));

  // left half of the square has mass 1/2
  auto Tleft = restrict(T, BoxUnion::single({v2(0, 0), v2(0.5, 1)}));
  CHECK(mass_by_formula(Tleft, BoxUnion::all(), 64).value == doctest::Approx(0.5).epsilon(1e-9));

  // additivity over a disjoint split
  auto Tright = restrict(T, BoxUnion::single({v2(0.5, 0), v2(1, 1)}));
  const double whole = evaluate(T, area, 64);
  CHECK(evaluate(Tleft, area, 64) + evaluate(Tright, area, 64) ==
        doctest::Approx(whole).epsilon(1e-9));

  // disjoint union mass equals the sum of masses
  BoxUnion both;
  both.boxes = {{v2(0, 0), v2(0.25, 1)}, {v2(0.5, 0), v2(0.75, 1)}};
  auto Tboth = restrict(T, both);
  CHECK(mass_by_formula(Tboth, BoxUnion::all(), 64).value ==
        doctest::Approx(0.25 + 0.25).epsilon(1e-9));
}

TEST_CASE("axiom 3 bound holds for sampled forms") {
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 3; ++trial) {
    const SemiNorm target = random_polytope_norm(2, 6);
    const SemiNorm sigma = SemiNorm::linf(2);
    auto T = linear_chart_current(random_invertible(2), target, sigma);
    for (int k = 0; k < 10; ++k) {
      TestForm w{k % 2 ? ScalarSpec::expression(expr::Expression::parse("x+2*y"))
                       : ScalarSpec::constant(1.5),
                 MapSpec::linear(random_invertible(2)), std::nullopt};
      const double lhs = std::abs(evaluate(T, w, 32));
      const auto bound = axiom3_bound(T, w, 32);
      CHECK(lhs <= bound.value * (1 + 1e-9) + 10 * bound.error_estimate + 1e-9);
    }
  }
}

TEST_CASE("strict locality via the truncation family") {
  // pi^{(1)} = psi vanishes on the support but not on a neighborhood;
  // the truncations psi_m are constant near the support, so T(f,pi_m)=0,
  // and continuity forces T(f, pi) -> 0.
  auto T = square_current(SemiNorm::euclidean(2), SemiNorm::euclidean(2));
  // f supported in [0, 1/2] x [0,1]; psi(x) = max(x_0 - 1/2, 0)
  TestForm base{ScalarSpec::indicator(BoxUnion::single({v2(0, 0), v2(0.5, 1)})),
                MapSpec::function(
                    [](const Vec& x) {
                      Vec y(2);
                      y << std::max(x[0] - 0.5, 0.0), x[1];
                      return y;
                    },
                    2, 2),
                std::nullopt};
  const double full = evaluate(T, base, 128);
  CHECK(std::abs(full) <= 1e-6);  // strict locality at quadrature resolution
  for (double m : {4.0, 16.0, 64.0}) {
    TestForm wm{base.f, truncate_coordinate(base.pi, 0, m), std::nullopt};
    CHECK(std::abs(evaluate(T, wm, 128)) <= 1e-9);
  }
}

TEST_CASE("continuity proxy: evaluations converge for pi_k -> pi") {
  auto T = square_current(SemiNorm::l1(2), SemiNorm::linf(2));
  TestForm w{ScalarSpec::constant(1.0), MapSpec::identity(2), std::nullopt};
  const double limit = evaluate(T, w, 64);
  double prev_gap = 1e9;
  for (double k : {2.0, 8.0, 32.0}) {
    MapSpec pik = MapSpec::function(
        [k](const Vec& x) {
          Vec y = x;
          y[0] += std::sin(x[1]) / k;
          return y;
        },
        2, 2);
    const double val = evaluate(T, {w.f, pik, std::nullopt}, 64);
    const double gap = std::abs(val - limit);
    CHECK(gap <= prev_gap + 1e-9);
    prev_gap = gap;
  }
  CHECK(prev_gap <= 1e-2);
}

TEST_CASE("classical mass equals the linf mass on linear charts") {
  for (int trial = 0; trial < 3; ++trial) {
    const SemiNorm target = random_polytope_norm(2, 6);
    auto T = linear_chart_current(random_invertible(2), target, SemiNorm::linf(2));
    const double m_formula = mass_by_formula(T, BoxUnion::all(), 32).value;
    std::vector<MapSpec> cands{optimal_test_map(T)};
    const double classical = classical_mass_by_duality(T, BoxUnion::all(), 1, cands, 32);
    CHECK(classical == doctest::Approx(m_formula).epsilon(1e-6));
  }
}
