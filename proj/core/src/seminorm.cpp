#include "fv/seminorm.hpp"

#include "fv/geometry.hpp"
#include "fv/lp.hpp"

#include <Eigen/Eigenvalues>
#include <random>

namespace fv {
namespace {

bool is_inf(double p) { return std::isinf(p); }

Mat symmetrize(const Mat& Q) { return 0.5 * (Q + Q.transpose()); }

double lp_eval(double p, const Vec& scales, const Vec& x) {
  if (is_inf(p)) {
    double m = 0.0;
    for (int i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i]) / scales[i]);
    return m;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i) s += std::abs(x[i]) / scales[i];
    return s;
  }
  if (p == 2.0) {
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i) {
      const double t = x[i] / scales[i];
      s += t * t;
    }
    return std::sqrt(s);
  }
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]) / scales[i], p);
  return std::pow(s, 1.0 / p);
}

// Unit ball of lp(p, scales) as a polytope, when it is one.
std::optional<std::vector<Vec>> lp_vertices(double p, const Vec& scales) {
  const int n = int(scales.size());
  std::vector<Vec> V;
  if (p == 1.0) {
    for (int i = 0; i < n; ++i) {
      Vec v = Vec::Zero(n);
      v[i] = scales[i];
      V.push_back(v);
      V.push_back(-v);
    }
    return V;
  }
  if (is_inf(p)) {
    const int total = 1 << n;
    for (int mask = 0; mask < total; ++mask) {
      Vec v(n);
      for (int i = 0; i < n; ++i) v[i] = (mask & (1 << i)) ? scales[i] : -scales[i];
      V.push_back(v);
    }
    return V;
  }
  return std::nullopt;
}

std::optional<std::vector<Vec>> lp_facets(double p, const Vec& scales) {
  const int n = int(scales.size());
  std::vector<Vec> H;
  if (is_inf(p)) {
    for (int i = 0; i < n; ++i) {
      Vec h = Vec::Zero(n);
      h[i] = 1.0 / scales[i];
      H.push_back(h);
      H.push_back(-h);
    }
    return H;
  }
  if (p == 1.0) {
    const int total = 1 << n;
    for (int mask = 0; mask < total; ++mask) {
      Vec h(n);
      for (int i = 0; i < n; ++i) h[i] = ((mask & (1 << i)) ? 1.0 : -1.0) / scales[i];
      H.push_back(h);
    }
    return H;
  }
  return std::nullopt;
}

}  // namespace

SemiNorm SemiNorm::ellipsoidal(Mat Q) {
  if (Q.rows() != Q.cols() || Q.rows() < 1) throw std::invalid_argument("ellipsoidal: Q must be square");
  Mat S = symmetrize(Q);
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  if (es.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, es.eigenvalues().maxCoeff()))
    throw std::invalid_argument("ellipsoidal: Q must be positive semi-definite");
  const int n = int(S.rows());
  return SemiNorm(n, Ellipsoidal{std::move(S)});
}

SemiNorm SemiNorm::polytope_vertices(std::vector<Vec> V) {
  if (V.empty()) throw std::invalid_argument("polytope_vertices: empty list");
  const int n = int(V[0].size());
  for (const auto& v : V) {
    if (int(v.size()) != n) throw std::invalid_argument("polytope_vertices: ragged list");
    if (!v.allFinite()) throw std::invalid_argument("polytope_vertices: non-finite entry");
  }
  auto sym = geom::with_reflections(V);
  if (!geom::spans(sym, n))
    throw std::domain_error("polytope_vertices: vertices do not span R^n (gauge infinite off-span)");
  return SemiNorm(n, PolytopeVertices{std::move(sym)});
}

SemiNorm SemiNorm::polytope_facets(std::vector<Vec> H) {
  if (H.empty()) throw std::invalid_argument("polytope_facets: empty list");
  const int n = int(H[0].size());
  for (const auto& h : H) {
    if (int(h.size()) != n) throw std::invalid_argument("polytope_facets: ragged list");
    if (!h.allFinite()) throw std::invalid_argument("polytope_facets: non-finite entry");
  }
  return SemiNorm(n, PolytopeFacets{geom::with_reflections(H)});
}

SemiNorm SemiNorm::lp(double p, Vec scales) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp: p must lie in [1, inf]");
  if (scales.size() < 1) throw std::invalid_argument("lp: empty scales");
  for (int i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0) || !std::isfinite(scales[i]))
      throw std::invalid_argument("lp: scales must be positive finite");
  }
  const int n = int(scales.size());
  return SemiNorm(n, LpNorm{p, std::move(scales)});
}

SemiNorm SemiNorm::lp(double p, int dim) { return lp(p, Vec::Ones(dim)); }

SemiNorm SemiNorm::pullback_of(const SemiNorm& base, const Mat& L) {
  if (int(L.rows()) != base.dim()) throw std::invalid_argument("pullback: L rows must match base dim");
  const int n = int(L.cols());

  // Simplify where the composition stays representation-exact.
  if (const auto* e = std::get_if<Ellipsoidal>(&base.repr()))
    return ellipsoidal(L.transpose() * e->Q * L);
  if (const auto* f = std::get_if<PolytopeFacets>(&base.repr())) {
    std::vector<Vec> H;
    H.reserve(f->H.size());
    for (const auto& h : f->H) H.push_back(L.transpose() * h);
    return SemiNorm(n, PolytopeFacets{std::move(H)});
  }
  const bool square = L.rows() == L.cols();
  if (square) {
    Eigen::FullPivLU<Mat> lu(L);
    if (lu.isInvertible() && std::abs(lu.determinant()) > kDegTol) {
      const Mat Linv = lu.inverse();
      if (const auto* v = std::get_if<PolytopeVertices>(&base.repr())) {
        std::vector<Vec> V;
        V.reserve(v->V.size());
        for (const auto& w : v->V) V.push_back(Linv * w);
        return SemiNorm(n, PolytopeVertices{std::move(V)});
      }
    }
  }
  if (const auto* v = std::get_if<PolytopeVertices>(&base.repr()); v && base.dim() <= 4) {
    // Slice / preimage of a vertex-form polytope: enumerate its facets
    // and pull those back, which is exact for any L.
    std::vector<Vec> H;
    for (const auto& h : geom::facet_enumeration(v->V)) H.push_back(L.transpose() * h);
    return SemiNorm(n, PolytopeFacets{geom::with_reflections(H)});
  }
  if (const auto* l = std::get_if<LpNorm>(&base.repr())) {
    // Diagonal maps fold into the scales.
    if (square && L.isDiagonal(1e-14)) {
      bool ok = true;
      Vec scales = l->scales;
      for (int i = 0; i < n; ++i) {
        const double d = L(i, i);
        if (std::abs(d) <= kDegTol) { ok = false; break; }
        scales[i] /= std::abs(d);
      }
      if (ok) return lp(l->p, scales);
    }
    if (auto V = lp_vertices(l->p, l->scales); V && square) {
      Eigen::FullPivLU<Mat> lu(L);
      if (lu.isInvertible() && std::abs(lu.determinant()) > kDegTol) {
        std::vector<Vec> W;
        const Mat Linv = lu.inverse();
        for (const auto& w : *V) W.push_back(Linv * w);
        return SemiNorm(n, PolytopeVertices{std::move(W)});
      }
    }
    if (auto H = lp_facets(l->p, l->scales)) {
      std::vector<Vec> HH;
      for (const auto& h : *H) HH.push_back(L.transpose() * h);
      return SemiNorm(n, PolytopeFacets{std::move(HH)});
    }
  }
  auto basep = std::make_shared<SemiNorm>(base);
  return SemiNorm(n, Pullback{std::move(basep), L});
}

double SemiNorm::operator()(const Vec& x) const {
  if (int(x.size()) != dim_) throw std::invalid_argument("seminorm: dimension mismatch");
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Ellipsoidal>) {
          return std::sqrt(std::max(0.0, x.dot(r.Q * x)));
        } else if constexpr (std::is_same_v<T, PolytopeVertices>) {
          return lp::polytope_gauge(r.V, x);
        } else if constexpr (std::is_same_v<T, PolytopeFacets>) {
          double m = 0.0;
          for (const auto& h : r.H) m = std::max(m, h.dot(x));
          return m;  // list is symmetric, so this is max |<h,x>|
        } else if constexpr (std::is_same_v<T, LpNorm>) {
          return lp_eval(r.p, r.scales, x);
        } else {
          return (*r.base)(r.L * x);
        }
      },
      repr_);
}

bool SemiNorm::is_norm() const {
  return std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Ellipsoidal>) {
          Eigen::SelfAdjointEigenSolver<Mat> es(r.Q);
          return es.eigenvalues().minCoeff() > kDegTol * std::max(1.0, es.eigenvalues().maxCoeff());
        } else if constexpr (std::is_same_v<T, PolytopeVertices>) {
          return geom::spans(r.V, dim_);
        } else if constexpr (std::is_same_v<T, PolytopeFacets>) {
          return geom::spans(r.H, dim_);
        } else if constexpr (std::is_same_v<T, LpNorm>) {
          return true;
        } else {
          if (!r.base->is_norm()) return false;
          Eigen::JacobiSVD<Mat> svd(r.L);
          if (svd.singularValues().size() < dim_) return false;
          return svd.singularValues()[dim_ - 1] >
                 kDegTol * std::max(1.0, svd.singularValues()[0]);
        }
      },
      repr_);
}

ConvexBodyVolume SemiNorm::ball_volume(std::int64_t quadrature_points) const {
  if (!is_norm()) throw std::domain_error("ball_volume: semi-norm is degenerate, unit ball unbounded");
  const int n = dim_;

  if (auto Q = ellipsoid_Q()) {
    const double det = Q->determinant();
    return {euclidean_ball_volume(n) / std::sqrt(det), VolumeMethod::exact_ellipsoid, 0.0};
  }
  if (auto V = polytope_vertex_form(); V && n <= 4) {
    return {geom::convex_hull_volume(*V), VolumeMethod::exact_polytope, 0.0};
  }
  if (const auto* pb = std::get_if<Pullback>(&repr_)) {
    // Bijective pullbacks carry the base volume exactly.
    if (pb->L.rows() == pb->L.cols()) {
      const double det = std::abs(pb->L.determinant());
      if (det > kDegTol) {
        ConvexBodyVolume bv = pb->base->ball_volume(quadrature_points);
        bv.value /= det;
        bv.error_bound /= det;
        return bv;
      }
    }
  }

  // Deterministic Halton quadrature over the bounding box.
  const Vec w = bounding_halfwidths();
  double box = 1.0;
  for (int i = 0; i < n; ++i) box *= 2.0 * w[i];
  std::int64_t inside = 0;
  Vec x(n);
  for (std::int64_t k = 0; k < quadrature_points; ++k) {
    for (int i = 0; i < n; ++i) x[i] = (2.0 * halton(k, halton_prime(i)) - 1.0) * w[i];
    if ((*this)(x) <= 1.0) ++inside;
  }
  const double frac = double(inside) / double(quadrature_points);
  const double value = box * frac;
  // 99%-style heuristic bound: CLT estimate on the hit fraction.
  const double err = 2.58 * box * std::sqrt(std::max(frac * (1.0 - frac), 1e-12) / double(quadrature_points));
  return {value, VolumeMethod::quadrature, err};
}

SemiNorm SemiNorm::polar() const {
  if (!is_norm()) throw std::domain_error("polar: degenerate semi-norm has no dual norm");
  return std::visit(
      [&](const auto& r) -> SemiNorm {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Ellipsoidal>) {
          return ellipsoidal(r.Q.inverse());
        } else if constexpr (std::is_same_v<T, PolytopeVertices>) {
          return SemiNorm(dim_, PolytopeFacets{r.V});
        } else if constexpr (std::is_same_v<T, PolytopeFacets>) {
          return SemiNorm(dim_, PolytopeVertices{r.H});
        } else if constexpr (std::is_same_v<T, LpNorm>) {
          double q;
          if (is_inf(r.p)) q = 1.0;
          else if (r.p == 1.0) q = std::numeric_limits<double>::infinity();
          else q = r.p / (r.p - 1.0);
          return lp(q, r.scales.cwiseInverse());
        } else {
          if (r.L.rows() != r.L.cols())
            throw std::invalid_argument("polar: pullback along non-square map unsupported");
          const Mat Linv = r.L.inverse();
          return pullback_of(r.base->polar(), Linv.transpose());
        }
      },
      repr_);
}

SemiNorm SemiNorm::scaled(double t) const {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("scaled: t must be positive finite");
  return std::visit(
      [&](const auto& r) -> SemiNorm {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Ellipsoidal>) {
          return SemiNorm(dim_, Ellipsoidal{t * t * r.Q});
        } else if constexpr (std::is_same_v<T, PolytopeVertices>) {
          std::vector<Vec> V;
          for (const auto& v : r.V) V.push_back(v / t);
          return SemiNorm(dim_, PolytopeVertices{std::move(V)});
        } else if constexpr (std::is_same_v<T, PolytopeFacets>) {
          std::vector<Vec> H;
          for (const auto& h : r.H) H.push_back(t * h);
          return SemiNorm(dim_, PolytopeFacets{std::move(H)});
        } else if constexpr (std::is_same_v<T, LpNorm>) {
          return SemiNorm(dim_, LpNorm{r.p, r.scales / t});
        } else {
          auto base = std::make_shared<SemiNorm>(r.base->scaled(t));
          return SemiNorm(dim_, Pullback{std::move(base), r.L});
        }
      },
      repr_);
}

SemiNorm SemiNorm::normalized_to_euclidean_ball_volume() const {
  const double vol = ball_volume().value;
  const double t = std::pow(vol / euclidean_ball_volume(dim_), 1.0 / dim_);
  return scaled(t);
}

std::optional<std::vector<Vec>> SemiNorm::polytope_vertex_form() const {
  if (const auto* v = std::get_if<PolytopeVertices>(&repr_)) return v->V;
  if (const auto* f = std::get_if<PolytopeFacets>(&repr_)) {
    if (dim_ <= 4) return geom::vertex_enumeration(f->H);
    return std::nullopt;
  }
  if (const auto* l = std::get_if<LpNorm>(&repr_)) return lp_vertices(l->p, l->scales);
  return std::nullopt;
}

std::optional<std::vector<Vec>> SemiNorm::polytope_facet_form() const {
  if (const auto* f = std::get_if<PolytopeFacets>(&repr_)) return f->H;
  if (const auto* v = std::get_if<PolytopeVertices>(&repr_)) {
    if (dim_ <= 4) return geom::facet_enumeration(v->V);
    return std::nullopt;
  }
  if (const auto* l = std::get_if<LpNorm>(&repr_)) return lp_facets(l->p, l->scales);
  return std::nullopt;
}

std::optional<Mat> SemiNorm::ellipsoid_Q() const {
  if (const auto* e = std::get_if<Ellipsoidal>(&repr_)) return e->Q;
  if (const auto* l = std::get_if<LpNorm>(&repr_)) {
    if (l->p == 2.0) {
      Mat Q = Mat::Zero(dim_, dim_);
      for (int i = 0; i < dim_; ++i) Q(i, i) = 1.0 / (l->scales[i] * l->scales[i]);
      return Q;
    }
  }
  return std::nullopt;
}

Vec SemiNorm::boundary_point(const Vec& u) const {
  const double s = (*this)(u);
  if (!(s > kDegTol)) throw std::domain_error("boundary_point: direction in the null cone");
  return u / s;
}

std::vector<Vec> SemiNorm::boundary_sample(int count) const {
  std::vector<Vec> pts;
  for (const auto& u : direction_grid(dim_, count)) pts.push_back(boundary_point(u));
  return pts;
}

Vec SemiNorm::bounding_halfwidths() const {
  const int n = dim_;
  Vec w(n);
  bool exact = true;
  SemiNorm dual = euclidean(n);
  try {
    dual = polar();
  } catch (const std::exception&) {
    exact = false;
  }
  if (exact && !std::holds_alternative<Pullback>(dual.repr())) {
    for (int i = 0; i < n; ++i) w[i] = dual(Vec::Unit(n, i));
    return w;
  }
  // Direction-sampled estimate with a safety inflation.
  w.setZero();
  for (const auto& u : boundary_sample(4 * default_direction_count(n))) {
    for (int i = 0; i < n; ++i) w[i] = std::max(w[i], std::abs(u[i]));
  }
  for (int i = 0; i < n; ++i) {
    const double axis = 1.0 / std::max((*this)(Vec::Unit(n, i)), kDegTol);
    w[i] = std::max(w[i], axis);
  }
  return 1.2 * w;
}

bool seminorm_axioms_hold(const SemiNorm& s, int samples, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  const int n = s.dim();
  for (int k = 0; k < samples; ++k) {
    Vec x(n), y(n);
    for (int i = 0; i < n; ++i) { x[i] = gauss(rng); y[i] = gauss(rng); }
    const double lam = unif(rng);
    const double sx = s(x), sy = s(y);
    if (std::abs(s(lam * x) - std::abs(lam) * sx) > tol * (1.0 + std::abs(lam) * sx)) return false;
    if (s(x + y) > sx + sy + tol * (1.0 + sx + sy)) return false;
  }
  return true;
}

}  // namespace fv
