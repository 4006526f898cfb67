#pragma once

#include "fv/types.hpp"

#include <memory>
#include <optional>
#include <variant>

namespace fv {

/// How a unit-ball volume was obtained.
enum class VolumeMethod { exact_ellipsoid, exact_polytope, quadrature };

struct ConvexBodyVolume {
  double value = 0.0;
  VolumeMethod method = VolumeMethod::quadrature;
  double error_bound = 0.0;  // zero for exact methods
};

/// A semi-norm on R^n under one of five representations:
///   ellipsoidal       s(x) = sqrt(x' Q x), Q symmetric PSD
///   polytope vertices ball = conv({+-v_i})
///   polytope facets   ball = {x : |<h_j,x>| <= 1}
///   lp                s(x) = || x_i / scale_i ||_p, p in [1,inf]
///   pullback          s = base o L
///
/// All unit balls are origin-symmetric by construction; vertex and
/// facet lists are stored with both signs present. Exact pullbacks
/// (ellipsoids, facet forms, bijective maps) are simplified into the
/// base representation at construction so volumes and Jacobians stay
/// exact downstream.
class SemiNorm {
 public:
  struct Ellipsoidal { Mat Q; };
  struct PolytopeVertices { std::vector<Vec> V; };  // symmetric list
  struct PolytopeFacets { std::vector<Vec> H; };    // symmetric list
  struct LpNorm { double p; Vec scales; };
  struct Pullback { std::shared_ptr<const SemiNorm> base; Mat L; };

  using Repr = std::variant<Ellipsoidal, PolytopeVertices, PolytopeFacets, LpNorm, Pullback>;

  static SemiNorm ellipsoidal(Mat Q);
  static SemiNorm polytope_vertices(std::vector<Vec> V);
  static SemiNorm polytope_facets(std::vector<Vec> H);
  static SemiNorm lp(double p, Vec scales);
  static SemiNorm lp(double p, int dim);  // unit scales
  static SemiNorm pullback_of(const SemiNorm& base, const Mat& L);

  static SemiNorm euclidean(int dim) { return lp(2.0, dim); }
  static SemiNorm l1(int dim) { return lp(1.0, dim); }
  static SemiNorm linf(int dim) { return lp(std::numeric_limits<double>::infinity(), dim); }

  int dim() const { return dim_; }
  const Repr& repr() const { return repr_; }

  /// s(x). Exact for ellipsoidal / facet / lp / pullback; the vertex
  /// representation evaluates the Minkowski gauge by linear programming.
  double operator()(const Vec& x) const;

  /// True when the gauge is finite and definite (a genuine norm).
  bool is_norm() const;

  /// Lebesgue measure of {s <= 1}. Exact for ellipsoids, polytopes
  /// (n <= 4) and lp with p in {1,inf}; otherwise deterministic
  /// Halton quadrature with a heuristic 99%-style error bound.
  /// Throws std::domain_error when the ball is unbounded.
  ConvexBodyVolume ball_volume(std::int64_t quadrature_points = 1 << 16) const;

  /// Dual norm. Supported for all concrete representations and for
  /// pullbacks along bijective maps.
  SemiNorm polar() const;

  /// The norm t * s (ball shrinks by 1/t).
  SemiNorm scaled(double t) const;

  /// Rescale so the unit ball has Lebesgue measure equal to the
  /// Euclidean ball volume (the Prop-style normalization).
  SemiNorm normalized_to_euclidean_ball_volume() const;

  /// Vertex / facet descriptions when the ball is (exactly) a
  /// polytope: vertex and facet forms, lp with p in {1,inf}; facet
  /// forms convert to vertices by dual enumeration for n <= 4.
  std::optional<std::vector<Vec>> polytope_vertex_form() const;
  std::optional<std::vector<Vec>> polytope_facet_form() const;

  std::optional<Mat> ellipsoid_Q() const;

  /// Boundary point along direction u: u / s(u).
  Vec boundary_point(const Vec& u) const;

  /// Boundary sample on a deterministic direction grid.
  std::vector<Vec> boundary_sample(int count = 0) const;

  /// Half-widths w_i with ball subset of prod [-w_i, w_i]; exact when the
  /// polar evaluates exactly, inflated direction-sampled bound otherwise.
  Vec bounding_halfwidths() const;

 private:
  SemiNorm(int dim, Repr repr) : dim_(dim), repr_(std::move(repr)) {}

  int dim_;
  Repr repr_;
};

/// s(lambda x) = |lambda| s(x) and s(x+y) <= s(x)+s(y) spot checks on
/// a sampled grid; used by tests and the axioms-check report.
bool seminorm_axioms_hold(const SemiNorm& s, int samples, std::uint64_t seed, double tol = 1e-9);

}  // namespace fv
