#include "fv/current.hpp"

#include <sstream>

namespace fv {

// ---------------------------------------------------------------- Multiplicity

Multiplicity Multiplicity::constant(double c) {
  Multiplicity m;
  m.data_ = c;
  return m;
}

Multiplicity Multiplicity::piecewise(std::vector<std::pair<quad::Box, double>> pieces) {
  Multiplicity m;
  m.data_ = std::move(pieces);
  return m;
}

Multiplicity Multiplicity::expression(expr::Expression e) {
  Multiplicity m;
  m.data_ = std::move(e);
  return m;
}

Multiplicity Multiplicity::function(std::function<double(const Vec&)> f) {
  Multiplicity m;
  m.data_ = std::move(f);
  return m;
}

double Multiplicity::operator()(const Vec& p) const {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, double>) {
          return d;
        } else if constexpr (std::is_same_v<T, std::vector<std::pair<quad::Box, double>>>) {
          for (const auto& [box, val] : d) {
            if (box.contains(p)) return val;
          }
          return 0.0;
        } else {
          return d(p);
        }
      },
      data_);
}

// ---------------------------------------------------------------------- MapSpec

MapSpec MapSpec::identity(int dim) { return linear(Mat::Identity(dim, dim)); }

MapSpec MapSpec::linear(Mat M) {
  MapSpec s;
  s.in_dim_ = int(M.cols());
  s.out_dim_ = int(M.rows());
  s.linear_ = M;
  s.eval_ = [M = std::move(M)](const Vec& x) { return Vec(M * x); };
  return s;
}

MapSpec MapSpec::expressions(std::vector<expr::Expression> comps, int in_dim) {
  if (comps.empty()) throw std::invalid_argument("MapSpec: no components");
  MapSpec s;
  s.in_dim_ = in_dim;
  s.out_dim_ = int(comps.size());
  s.exprs_ = comps;
  s.eval_ = [comps = std::move(comps)](const Vec& x) {
    Vec y(comps.size());
    for (size_t i = 0; i < comps.size(); ++i) y[int(i)] = comps[i](x);
    return y;
  };
  return s;
}

MapSpec MapSpec::function(std::function<Vec(const Vec&)> f, int in_dim, int out_dim) {
  MapSpec s;
  s.in_dim_ = in_dim;
  s.out_dim_ = out_dim;
  s.eval_ = std::move(f);
  return s;
}

Vec MapSpec::operator()(const Vec& x) const {
  if (int(x.size()) != in_dim_) throw std::invalid_argument("MapSpec: dimension mismatch");
  return eval_(x);
}

Mat MapSpec::differential(const Vec& x, double h) const {
  if (linear_) return *linear_;
  if (!(h > 0)) throw std::invalid_argument("MapSpec::differential: step must be positive");
  Mat D(out_dim_, in_dim_);
  Vec q = x;
  for (int i = 0; i < in_dim_; ++i) {
    q[i] = x[i] + h;
    const Vec fp = eval_(q);
    q[i] = x[i] - h;
    const Vec fm = eval_(q);
    q[i] = x[i];
    D.col(i) = (fp - fm) / (2.0 * h);
  }
  return D;
}

MapSpec MapSpec::scaled(double inv_lambda) const {
  if (linear_) return linear(inv_lambda * (*linear_));
  MapSpec s = *this;
  s.eval_ = [e = eval_, inv_lambda](const Vec& x) { return Vec(inv_lambda * e(x)); };
  s.linear_.reset();
  return s;
}

MapSpec MapSpec::after(const MapSpec& g) const {
  if (g.out_dim_ != in_dim_) throw std::invalid_argument("MapSpec::after: dimension mismatch");
  if (linear_ && g.linear_) return linear((*linear_) * (*g.linear_));
  MapSpec s;
  s.in_dim_ = g.in_dim_;
  s.out_dim_ = out_dim_;
  s.eval_ = [f = eval_, ge = g.eval_](const Vec& x) { return f(ge(x)); };
  return s;
}

// -------------------------------------------------------------------- ScalarSpec

ScalarSpec ScalarSpec::constant(double c) {
  ScalarSpec s;
  s.data_ = c;
  return s;
}

ScalarSpec ScalarSpec::expression(expr::Expression e) {
  ScalarSpec s;
  s.data_ = std::move(e);
  return s;
}

ScalarSpec ScalarSpec::indicator(BoxUnion region, double value) {
  ScalarSpec s;
  s.data_ = Indicator{std::move(region), value};
  return s;
}

double ScalarSpec::operator()(const Vec& x) const {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, double>) {
          return d;
        } else if constexpr (std::is_same_v<T, expr::Expression>) {
          return d(x);
        } else {
          return d.region.contains(x) ? d.value : 0.0;
        }
      },
      data_);
}

// ------------------------------------------------------------------ DeskCurrent

DeskCurrent validate_current(DeskCurrent T) {
  T.atlas = validate_atlas(std::move(T.atlas));
  if (T.theta.size() != T.atlas.charts.size())
    throw std::invalid_argument("current: one multiplicity per chart required");
  if (T.sigma.dim() != T.atlas.domain_dim())
    throw std::invalid_argument("current: sigma must be a norm on R^n, n the chart dimension");
  if (!T.sigma.is_norm()) throw std::invalid_argument("current: sigma must be a norm");
  return T;
}

namespace {

double fd_step(const quad::Box& box) { return 1e-5 * std::max(box.diameter(), 1e-12); }

}  // namespace

double evaluate(const DeskCurrent& T, const TestForm& w, int quad_points_per_axis) {
  const int n = T.dim();
  if (w.pi.in_dim() != T.atlas.target_dim() || w.pi.out_dim() != n)
    throw std::invalid_argument("evaluate: pi must map the target space to R^n");
  double total = 0.0;
  for (size_t i = 0; i < T.atlas.charts.size(); ++i) {
    const Chart& chart = T.atlas.charts[i];
    const Multiplicity& theta = T.theta[i];
    const double h = fd_step(chart.domain);
    const auto composed_linear =
        (w.pi.linear_matrix() && chart.map.linear_matrix())
            ? std::optional<Mat>((*w.pi.linear_matrix()) * (*chart.map.linear_matrix()))
            : std::nullopt;
    auto integrand = [&](const Vec& p) -> double {
      if (!chart.in_domain(p)) return 0.0;
      const Vec x = chart.map(p);
      if (!T.support_mask.contains(x)) return 0.0;
      const double th = theta(p);
      if (th == 0.0) return 0.0;
      const double fx = w.f(x);
      if (fx == 0.0) return 0.0;
      double det;
      if (composed_linear) {
        det = composed_linear->determinant();
      } else {
        // central differences of pi o phi at p
        Mat D(n, n);
        Vec q = p;
        for (int k = 0; k < n; ++k) {
          q[k] = p[k] + h;
          const Vec yp = w.pi(chart.map(q));
          q[k] = p[k] - h;
          const Vec ym = w.pi(chart.map(q));
          q[k] = p[k];
          D.col(k) = (yp - ym) / (2.0 * h);
        }
        det = D.determinant();
      }
      const double v = th * fx * det;
      if (!std::isfinite(v)) throw std::domain_error("evaluate: non-finite integrand");
      return v;
    };
    total += quad::tensor_midpoint(chart.domain, quad_points_per_axis, integrand);
  }
  return total;
}

double lipschitz_norm(const MapSpec& pi, const SemiNorm& sigma, const SemiNorm& source_norm,
                      const quad::Box& sample_box, int samples_per_axis) {
  if (pi.out_dim() != sigma.dim())
    throw std::invalid_argument("lipschitz_norm: sigma dimension mismatch");
  if (pi.in_dim() != source_norm.dim())
    throw std::invalid_argument("lipschitz_norm: source norm dimension mismatch");

  const auto opnorm = [&](const Mat& D) -> double {
    if (auto V = source_norm.polytope_vertex_form()) {
      double m = 0.0;
      for (const auto& v : *V) m = std::max(m, sigma(D * v));
      return m;  // convexity: vertex maximum is the exact sup
    }
    if (auto Qsrc = source_norm.ellipsoid_Q()) {
      if (auto Qsig = sigma.ellipsoid_Q()) {
        Eigen::SelfAdjointEigenSolver<Mat> es(*Qsrc);
        const Mat T_ = es.operatorInverseSqrt();
        const Mat Mm = T_ * D.transpose() * (*Qsig) * D * T_;
        Eigen::SelfAdjointEigenSolver<Mat> es2(Mm);
        return std::sqrt(std::max(0.0, es2.eigenvalues().maxCoeff()));
      }
    }
    double m = 0.0;
    for (const auto& u : direction_grid(pi.in_dim())) {
      m = std::max(m, sigma(D * u) / source_norm(u));
    }
    return m;
  };

  if (pi.linear_matrix()) return opnorm(*pi.linear_matrix());

  const double h = fd_step(sample_box);
  double sup = 0.0;
  const int n = sample_box.dim();
  const int per = std::max(samples_per_axis, 1);
  std::vector<int> idx(n, 0);
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= per;
  Vec x(n);
  for (std::int64_t k = 0; k < total; ++k) {
    for (int i = 0; i < n; ++i)
      x[i] = sample_box.lo[i] + (idx[i] + 0.5) * (sample_box.hi[i] - sample_box.lo[i]) / per;
    sup = std::max(sup, opnorm(pi.differential(x, h)));
    for (int i = 0; i < n; ++i) {
      if (++idx[i] < per) break;
      idx[i] = 0;
    }
  }
  return sup;
}

MassResult mass_by_formula(const DeskCurrent& T, const BoxUnion& A, int quad_points_per_axis,
                           const JacobianOptions& opts) {
  const JacobianKind kind = JacobianKind::generic(T.sigma);
  BoxUnion region = A;
  if (!T.support_mask.everything()) {
    if (region.everything()) {
      region = T.support_mask;
    } else {
      // Intersect the two box unions cell by cell.
      BoxUnion inter;
      for (const auto& a : region.boxes) {
        for (const auto& b : T.support_mask.boxes) {
          quad::Box c{a.lo.cwiseMax(b.lo), a.hi.cwiseMin(b.hi)};
          bool ok = true;
          for (int i = 0; i < c.lo.size(); ++i) ok = ok && c.lo[i] < c.hi[i];
          if (ok) inter.boxes.push_back(c);
        }
      }
      if (inter.boxes.empty()) return {0.0, 0.0};
      region = inter;
    }
  }
  MassResult out;
  for (size_t i = 0; i < T.atlas.charts.size(); ++i) {
    const auto& theta = T.theta[i];
    auto r = detail::weighted_chart_integral(
        T.atlas.charts[i], kind, region, quad_points_per_axis, opts,
        [&](const Vec& p) { return std::abs(theta(p)); });
    out.value += r.value;
    out.error_estimate += r.error_estimate;
  }
  return out;
}

namespace {

// Cells partitioning the target region used by the duality bound.
std::vector<quad::Box> partition_cells(const DeskCurrent& T, const BoxUnion& A,
                                       int partitions_per_axis) {
  std::vector<quad::Box> roots;
  if (!A.everything()) {
    roots = A.boxes;
  } else {
    // Bounding box of the chart images (sampled at box corners and
    // midpoints, inflated).
    const int m = T.atlas.target_dim();
    Vec lo = Vec::Constant(m, std::numeric_limits<double>::infinity());
    Vec hi = -lo;
    for (const auto& chart : T.atlas.charts) {
      const int n = chart.domain.dim();
      const int corners = 1 << n;
      for (int mask = 0; mask <= corners; ++mask) {
        Vec p(n);
        if (mask == corners) {
          p = 0.5 * (chart.domain.lo + chart.domain.hi);
        } else {
          for (int i = 0; i < n; ++i)
            p[i] = (mask & (1 << i)) ? chart.domain.hi[i] : chart.domain.lo[i];
        }
        const Vec x = chart.map(p);
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
      }
    }
    const Vec pad = 0.05 * (hi - lo).cwiseMax(1e-6);
    roots.push_back({lo - pad, hi + pad});
  }
  std::vector<quad::Box> cells;
  const int k = std::max(partitions_per_axis, 1);
  for (const auto& root : roots) {
    const int m = root.dim();
    std::int64_t total = 1;
    for (int i = 0; i < m; ++i) total *= k;
    std::vector<int> idx(m, 0);
    const Vec h = (root.hi - root.lo) / double(k);
    for (std::int64_t c = 0; c < total; ++c) {
      Vec lo = root.lo, hi = root.lo;
      for (int i = 0; i < m; ++i) {
        lo[i] += idx[i] * h[i];
        hi[i] += (idx[i] + 1) * h[i];
      }
      cells.push_back({lo, hi});
      for (int i = 0; i < m; ++i) {
        if (++idx[i] < k) break;
        idx[i] = 0;
      }
    }
  }
  return cells;
}

quad::Box reference_sample_box(const DeskCurrent& T) {
  const int m = T.atlas.target_dim();
  Vec lo = Vec::Constant(m, std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  for (const auto& chart : T.atlas.charts) {
    const int n = chart.domain.dim();
    for (int mask = 0; mask < (1 << n); ++mask) {
      Vec p(n);
      for (int i = 0; i < n; ++i)
        p[i] = (mask & (1 << i)) ? chart.domain.hi[i] : chart.domain.lo[i];
      const Vec x = chart.map(p);
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
    }
  }
  return {lo, hi};
}

double duality_sum_for_candidate(const DeskCurrent& T, const MapSpec& pi_hat,
                                 const std::vector<quad::Box>& cells, int quad_points_per_axis) {
  // The per-cell absolute value realizes the measurable sign choice:
  // in the limit of fine cells this is sup over |f| <= 1_A of T(f, pi).
  double total = 0.0;
  for (const auto& cell : cells) {
    TestForm w{ScalarSpec::indicator(BoxUnion::single(cell)), pi_hat, std::nullopt};
    total += std::abs(evaluate(T, w, quad_points_per_axis));
  }
  return total;
}

}  // namespace

DualityResult mass_by_duality(const DeskCurrent& T, const BoxUnion& A, int partitions_per_axis,
                              const std::vector<MapSpec>& candidates, int quad_points_per_axis) {
  if (candidates.empty()) throw std::invalid_argument("mass_by_duality: empty candidate set");
  const auto cells = partition_cells(T, A, partitions_per_axis);
  const auto box = reference_sample_box(T);
  const SemiNorm source_norm = T.atlas.charts[0].map.target_norm();
  DualityResult best;
  for (size_t c = 0; c < candidates.size(); ++c) {
    const double lam = lipschitz_norm(candidates[c], T.sigma, source_norm, box);
    if (!(lam > 0) || !std::isfinite(lam)) continue;  // the zero map contributes nothing
    const MapSpec pi_hat = candidates[c].scaled(1.0 / lam);
    const double val = duality_sum_for_candidate(T, pi_hat, cells, quad_points_per_axis);
    if (val > best.value) {
      best.value = val;
      best.best_candidate = int(c);
    }
  }
  return best;
}

MapSpec optimal_test_map(const DeskCurrent& T, int chart_index, const JacobianOptions& opts) {
  const Chart& chart = T.atlas.charts.at(chart_index);
  const auto M = chart.map.linear_matrix();
  if (!M || M->rows() != M->cols())
    throw std::invalid_argument(
        "optimal_test_map: requires a full-dimensional linear chart (pi* = F o I^{-1})");
  const auto md = metric_differential(chart.map, 0.5 * (chart.domain.lo + chart.domain.hi), -1.0,
                                      &chart.domain);
  const auto res = jacobian(JacobianKind::generic(T.sigma), md.seminorm, opts);
  if (!res.optimizer) throw SolverError("optimal_test_map: jacobian returned no optimizer");
  return MapSpec::linear((*res.optimizer) * M->inverse());
}

double classical_mass_by_duality(const DeskCurrent& T, const BoxUnion& A, int partitions_per_axis,
                                 std::vector<MapSpec> candidates, int quad_points_per_axis) {
  // Classical currents rescale each coordinate of pi by its own
  // Lipschitz constant; with the sup-norm on R^n that makes
  // L^infty(pi) <= 1, so this is the L^infty duality with a
  // coordinatewise normalization.
  const auto cells = partition_cells(T, A, partitions_per_axis);
  const auto box = reference_sample_box(T);
  const SemiNorm source_norm = T.atlas.charts[0].map.target_norm();
  const int n = T.dim();
  double best = 0.0;
  for (const auto& cand : candidates) {
    MapSpec pi_hat = cand;
    if (auto M = cand.linear_matrix()) {
      Mat R = *M;
      for (int i = 0; i < n; ++i) {
        const double lip =
            lipschitz_norm(MapSpec::linear(R.row(i)), SemiNorm::euclidean(1), source_norm, box);
        if (lip > 0) R.row(i) /= lip;
      }
      pi_hat = MapSpec::linear(R);
    } else {
      const double lam = lipschitz_norm(cand, SemiNorm::linf(n), source_norm, box);
      if (!(lam > 0)) continue;
      pi_hat = cand.scaled(1.0 / lam);
    }
    best = std::max(best, duality_sum_for_candidate(T, pi_hat, cells, quad_points_per_axis));
  }
  return best;
}

MassComparison compare_masses(const DeskCurrent& T, const BoxUnion& A, int quad_points_per_axis,
                              const JacobianOptions& opts) {
  const int n = T.dim();
  MassComparison out;
  out.c = std::pow(double(n), n);

  // Normalize sigma so J^sigma is a normalized Jacobian
  // (J^sigma(euclidean) = J^ir(sigma) = 1). Both comparison chains
  // hold under this normalization; the l2 lower chain fails under
  // plain ball-volume normalization.
  DeskCurrent Ts = T;
  const double jir = jacobian(JacobianKind::inscribed_riemannian(), T.sigma, opts).value;
  Ts.sigma = T.sigma.scaled(std::pow(jir, 1.0 / n));
  DeskCurrent T2 = T;
  T2.sigma = SemiNorm::euclidean(n);
  DeskCurrent Ti = T;
  Ti.sigma = SemiNorm::linf(n);

  const auto ms = mass_by_formula(Ts, A, quad_points_per_axis, opts);
  const auto m2 = mass_by_formula(T2, A, quad_points_per_axis, opts);
  const auto mi = mass_by_formula(Ti, A, quad_points_per_axis, opts);
  out.m_sigma = ms.value;
  out.m_2 = m2.value;
  out.m_inf = mi.value;

  // m_sigma is a certified lower bound when sigma needs the ascent
  // solver, so the chains are compared with the solver tolerance.
  const double slack =
      1e-6 * std::max({out.m_sigma, out.m_2, out.m_inf, 1e-12}) + ms.error_estimate +
      m2.error_estimate + mi.error_estimate;
  out.chain_l2_ok = (out.m_2 <= out.m_sigma + slack) && (out.m_sigma <= out.c * out.m_2 + slack);
  out.chain_linf_ok = (out.m_sigma / out.c <= out.m_inf + slack) &&
                      (out.m_inf <= out.c * out.m_sigma + slack);
  if (!out.chain_l2_ok || !out.chain_linf_ok) {
    std::ostringstream os;
    os << "m_2=" << out.m_2 << " m_sigma=" << out.m_sigma << " m_inf=" << out.m_inf
       << " C=" << out.c;
    out.witness = os.str();
  }
  return out;
}

DeskCurrent pushforward(const DeskCurrent& T, const MapSpec& g, SemiNorm new_target_norm) {
  if (g.in_dim() != T.atlas.target_dim())
    throw std::invalid_argument("pushforward: map domain must match the current target space");
  if (new_target_norm.dim() != g.out_dim())
    throw std::invalid_argument("pushforward: norm dimension mismatch");
  DeskCurrent out = T;
  out.atlas.charts.clear();
  for (const auto& chart : T.atlas.charts) {
    Chart c = chart;
    if (auto Mg = g.linear_matrix(); Mg && chart.map.linear_matrix()) {
      c.map = LipschitzMap::linear((*Mg) * (*chart.map.linear_matrix()), new_target_norm);
    } else {
      c.map = LipschitzMap(
          chart.map.domain_dim(), g.out_dim(),
          [g, inner = chart.map](const Vec& p) { return g(inner(p)); }, new_target_norm);
    }
    out.atlas.charts.push_back(std::move(c));
  }
  // The support mask lived in the old target space; bake it into the
  // multiplicities through the old chart maps.
  if (!T.support_mask.everything()) {
    out.support_mask = BoxUnion::all();
    for (size_t i = 0; i < out.theta.size(); ++i) {
      out.theta[i] = Multiplicity::function(
          [base = T.theta[i], mask = T.support_mask, inner = T.atlas.charts[i].map](const Vec& p) {
            return mask.contains(inner(p)) ? base(p) : 0.0;
          });
    }
  }
  return out;
}

DeskCurrent restrict(const DeskCurrent& T, const BoxUnion& A) {
  DeskCurrent out = T;
  if (A.everything()) return out;
  if (out.support_mask.everything()) {
    out.support_mask = A;
    return out;
  }
  BoxUnion inter;
  for (const auto& a : out.support_mask.boxes) {
    for (const auto& b : A.boxes) {
      quad::Box c{a.lo.cwiseMax(b.lo), a.hi.cwiseMin(b.hi)};
      bool ok = true;
      for (int i = 0; i < c.lo.size(); ++i) ok = ok && c.lo[i] < c.hi[i];
      if (ok) inter.boxes.push_back(c);
    }
  }
  if (inter.boxes.empty()) inter.boxes.push_back({Vec::Zero(T.atlas.target_dim()),
                                                  Vec::Zero(T.atlas.target_dim())});
  out.support_mask = inter;
  return out;
}

MassResult axiom3_bound(const DeskCurrent& T, const TestForm& w, int quad_points_per_axis,
                        const JacobianOptions& opts) {
  const double lam = w.l_sigma ? *w.l_sigma
                               : lipschitz_norm(w.pi, T.sigma,
                                                T.atlas.charts[0].map.target_norm(),
                                                reference_sample_box(T));
  const JacobianKind kind = JacobianKind::generic(T.sigma);
  MassResult out;
  for (size_t i = 0; i < T.atlas.charts.size(); ++i) {
    const auto& theta = T.theta[i];
    const auto& chart = T.atlas.charts[i];
    auto r = detail::weighted_chart_integral(
        chart, kind, T.support_mask, quad_points_per_axis, opts,
        [&](const Vec& p) { return std::abs(theta(p) * w.f(chart.map(p))); });
    out.value += r.value;
    out.error_estimate += r.error_estimate;
  }
  out.value *= std::pow(lam, T.dim());
  out.error_estimate *= std::pow(lam, T.dim());
  return out;
}

MapSpec truncate_coordinate(const MapSpec& pi, int coord, double m) {
  if (coord < 0 || coord >= pi.out_dim())
    throw std::invalid_argument("truncate_coordinate: bad coordinate");
  if (!(m > 0)) throw std::invalid_argument("truncate_coordinate: m must be positive");
  return MapSpec::function(
      [pi, coord, m](const Vec& x) {
        Vec y = pi(x);
        const double v = y[coord];
        if (std::abs(v) <= 1.0 / m) y[coord] = 0.0;
        else if (v > 0) y[coord] = v - 1.0 / m;
        else y[coord] = v + 1.0 / m;
        return y;
      },
      pi.in_dim(), pi.out_dim());
}

}  // namespace fv
