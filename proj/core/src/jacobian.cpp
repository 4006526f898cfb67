#include "fv/jacobian.hpp"

#include "fv/ellipsoid.hpp"
#include "fv/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <random>

namespace fv {

JacobianKind JacobianKind::generic(SemiNorm sigma) {
  if (!sigma.is_norm()) throw std::invalid_argument("jacobian: sigma must be a norm");
  JacobianKind k(Type::generic_sigma);
  k.sigma_ = std::move(sigma);
  return k;
}

std::optional<SemiNorm> JacobianKind::resolve_sigma(int n) const {
  switch (type_) {
    case Type::generic_sigma:
      if (sigma_->dim() != n)
        throw std::invalid_argument("jacobian: sigma dimension does not match the semi-norm");
      return sigma_;
    case Type::circumscribed_riemannian:
      return SemiNorm::euclidean(n);
    case Type::mass_star:
      return SemiNorm::linf(n);
    default:
      return std::nullopt;
  }
}

std::string JacobianKind::name() const {
  switch (type_) {
    case Type::generic_sigma: return "generic-sigma";
    case Type::busemann: return "busemann";
    case Type::holmes_thompson: return "holmes-thompson";
    case Type::inscribed_riemannian: return "inscribed-riemannian";
    case Type::circumscribed_riemannian: return "circumscribed-riemannian";
    case Type::mass_star: return "mass-star";
  }
  return "?";
}

namespace {

Mat sqrt_spd(const Mat& Q) {
  Eigen::SelfAdjointEigenSolver<Mat> es(Q);
  return es.operatorSqrt();
}

Mat inv_sqrt_spd(const Mat& Q) {
  Eigen::SelfAdjointEigenSolver<Mat> es(Q);
  return es.operatorInverseSqrt();
}

struct CrSolution {
  double value = 0.0;
  Mat F;          // maps B_s into the Euclidean unit ball, maximal |det|
  bool exact = true;
};

CrSolution circumscribed_solution(const SemiNorm& s, const JacobianOptions& opts) {
  if (auto Q = s.ellipsoid_Q()) {
    return {std::sqrt(Q->determinant()), sqrt_spd(*Q), true};
  }
  auto ext = loewner_of_ball(s, opts.mvee_gap_tol);
  return {std::sqrt(ext.ellipsoid.A.determinant()), ext.ellipsoid.sqrt_A(), ext.exact};
}

// sigma given by exactly n independent facet pairs: the constraint
// decouples across the rows of H F, which must lie in the polar ball
// of s. |det| is linear in each row, so the maximum over a polytopal
// polar ball is attained on its vertex set.
std::optional<Mat> parallelotope_matrix(const SemiNorm& sigma) {
  auto facets = sigma.polytope_facet_form();
  if (!facets) return std::nullopt;
  const int n = sigma.dim();
  std::vector<Vec> half;
  for (const auto& h : *facets) {
    bool dup = false;
    for (const auto& g : half) {
      if ((g - h).lpNorm<Eigen::Infinity>() < 1e-12 || (g + h).lpNorm<Eigen::Infinity>() < 1e-12) {
        dup = true;
        break;
      }
    }
    if (!dup) half.push_back(h);
  }
  if (int(half.size()) != n) return std::nullopt;
  Mat H(n, n);
  for (int i = 0; i < n; ++i) H.row(i) = half[i].transpose();
  if (std::abs(H.determinant()) <= kDegTol) return std::nullopt;
  return H;
}

std::optional<Mat> max_det_rows_in_ball(const SemiNorm& polar_ball_of, const JacobianOptions&) {
  // Rows constrained to the polar ball of `polar_ball_of`.
  const SemiNorm dual = polar_ball_of.polar();
  const int n = dual.dim();
  auto verts = dual.polytope_vertex_form();
  if (!verts) return std::nullopt;
  const auto& P = *verts;
  const int m = int(P.size());
  if (m < n) return std::nullopt;

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
  double best = 0.0;
  Mat G = Mat::Identity(n, n), B(n, n);
  do {
    for (int i = 0; i < n; ++i) B.row(i) = P[comb[i]].transpose();
    const double d = std::abs(B.determinant());
    if (d > best) {
      best = d;
      G = B;
    }
  } while (advance());
  if (best <= 0.0) return std::nullopt;
  return G;
}

// ---------------------------------------------------------------------------
// Generic determinant-maximization engine:
//   maximize  log|det F| - n log g(F),   g(F) = max_k sigma(F v_k)
// over F, which is the scale-invariant form of  max |det F| s.t.
// F(B_s) in B_sigma. The max is smoothed by log-sum-exp with a
// continuation schedule so plain gradient ascent converges through
// the kinks; the returned F is renormalized by the exact g.
// ---------------------------------------------------------------------------

struct ContainmentProblem {
  int n = 0;

  // Test points spanning B_s (vertices when polytopal, boundary
  // samples otherwise). Empty in sphere mode.
  std::vector<Vec> points;
  bool points_exact = true;

  // sphere mode: B_s is the Euclidean ball and sigma has facet form,
  // so the components are |F' h_j|_2 over facets.
  bool sphere_mode = false;

  enum class SigmaForm { facets, ellipsoid, lp } form = SigmaForm::facets;
  std::vector<Vec> sig_facets;  // symmetric list
  Mat sig_Q;
  double sig_p = 2.0;
  Vec sig_scales;
  bool sigma_exact = true;

  double sigma_eval(const Vec& y) const {
    switch (form) {
      case SigmaForm::facets: {
        double m = 0.0;
        for (const auto& h : sig_facets) m = std::max(m, h.dot(y));
        return m;
      }
      case SigmaForm::ellipsoid:
        return std::sqrt(std::max(0.0, y.dot(sig_Q * y)));
      case SigmaForm::lp: {
        if (std::isinf(sig_p)) {
          double m = 0.0;
          for (int i = 0; i < y.size(); ++i) m = std::max(m, std::abs(y[i]) / sig_scales[i]);
          return m;
        }
        double acc = 0.0;
        for (int i = 0; i < y.size(); ++i) acc += std::pow(std::abs(y[i]) / sig_scales[i], sig_p);
        return std::pow(acc, 1.0 / sig_p);
      }
    }
    return 0.0;
  }

  Vec sigma_grad(const Vec& y) const {
    switch (form) {
      case SigmaForm::facets: {
        double m = -1.0;
        const Vec* best = nullptr;
        for (const auto& h : sig_facets) {
          const double v = h.dot(y);
          if (v > m) { m = v; best = &h; }
        }
        return *best;
      }
      case SigmaForm::ellipsoid: {
        const double v = sigma_eval(y);
        return sig_Q * y / std::max(v, 1e-300);
      }
      case SigmaForm::lp: {
        const double v = sigma_eval(y);
        Vec g = Vec::Zero(y.size());
        if (std::isinf(sig_p)) {
          int arg = 0;
          double m = -1;
          for (int i = 0; i < y.size(); ++i) {
            if (std::abs(y[i]) / sig_scales[i] > m) { m = std::abs(y[i]) / sig_scales[i]; arg = i; }
          }
          g[arg] = (y[arg] >= 0 ? 1.0 : -1.0) / sig_scales[arg];
          return g;
        }
        for (int i = 0; i < y.size(); ++i) {
          const double t = std::abs(y[i]) / sig_scales[i];
          if (t > 0)
            g[i] = ((y[i] >= 0) ? 1.0 : -1.0) * std::pow(t, sig_p - 1.0) *
                   std::pow(v, 1.0 - sig_p) / sig_scales[i];
        }
        return g;
      }
    }
    return Vec();
  }

  double g_exact(const Mat& F) const {
    double m = 0.0;
    if (sphere_mode) {
      for (const auto& h : sig_facets) m = std::max(m, (F.transpose() * h).norm());
      return m;
    }
    for (const auto& v : points) m = std::max(m, sigma_eval(F * v));
    return m;
  }

  // tau-smoothed max with gradient; components shifted by the exact
  // max for a stable log-sum-exp.
  double g_smooth(const Mat& F, double tau, Mat* grad) const {
    std::vector<double> c;
    std::vector<Mat> dc;
    if (sphere_mode) {
      c.reserve(sig_facets.size());
      for (const auto& h : sig_facets) {
        const Vec w = F.transpose() * h;
        const double v = std::max(w.norm(), 1e-300);
        c.push_back(v);
        if (grad) dc.push_back(h * (w / v).transpose());
      }
    } else if (form == SigmaForm::facets) {
      c.reserve(points.size() * sig_facets.size());
      for (const auto& v : points) {
        const Vec y = F * v;
        for (const auto& h : sig_facets) {
          c.push_back(h.dot(y));
          if (grad) dc.push_back(h * v.transpose());
        }
      }
    } else {
      c.reserve(points.size());
      for (const auto& v : points) {
        const Vec y = F * v;
        c.push_back(sigma_eval(y));
        if (grad) dc.push_back(sigma_grad(y) * v.transpose());
      }
    }
    double cmax = -std::numeric_limits<double>::infinity();
    for (double v : c) cmax = std::max(cmax, v);
    double z = 0.0;
    for (double v : c) z += std::exp((v - cmax) / tau);
    if (grad) {
      grad->setZero(F.rows(), F.cols());
      for (size_t i = 0; i < c.size(); ++i) *grad += std::exp((c[i] - cmax) / tau) * dc[i];
      *grad /= z;
    }
    return cmax + tau * std::log(z);
  }
};

double objective(const ContainmentProblem& prob, const Mat& F, double tau, Mat* grad) {
  const double det = F.determinant();
  if (std::abs(det) < 1e-300) return -std::numeric_limits<double>::infinity();
  Mat ggrad;
  const double g = prob.g_smooth(F, tau, grad ? &ggrad : nullptr);
  if (!(g > 0.0)) return -std::numeric_limits<double>::infinity();
  const double val = std::log(std::abs(det)) - prob.n * std::log(g);
  if (grad) *grad = F.inverse().transpose() - (double(prob.n) / g) * ggrad;
  return val;
}

Mat ascend(const ContainmentProblem& prob, Mat F, const JacobianOptions& opts) {
  static const double taus[] = {1e-2, 1e-4, 1e-6, 1e-8};
  for (double tau : taus) {
    double step = 0.1;
    double fval = objective(prob, F, tau, nullptr);
    for (int it = 0; it < opts.ascent_max_iter; ++it) {
      Mat grad;
      fval = objective(prob, F, tau, &grad);
      const double gn = grad.norm();
      if (gn < 1e-13 * std::max(1.0, std::abs(fval))) break;
      bool accepted = false;
      for (int bt = 0; bt < 50; ++bt) {
        Mat Fn = F + (step / gn) * grad;
        const double fn = objective(prob, Fn, tau, nullptr);
        if (fn > fval + 1e-14) {
          F = std::move(Fn);
          fval = fn;
          step = std::min(step * 1.3, 1e3);
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
  }
  return F;
}

JacobianResult generic_jacobian(const SemiNorm& sigma_in, const SemiNorm& s,
                                const JacobianOptions& opts) {
  const int n = s.dim();

  // sigma ellipsoidal: substitute F -> Qs^{1/2} F and the problem is
  // the Loewner solve.
  if (auto Qsig = sigma_in.ellipsoid_Q()) {
    CrSolution cr = circumscribed_solution(s, opts);
    const Mat Fi = inv_sqrt_spd(*Qsig);
    JacobianResult r;
    r.value = cr.value / std::sqrt(Qsig->determinant());
    r.optimizer = Fi * cr.F;
    r.certified = cr.exact;
    return r;
  }

  // sigma a parallelotope (n facet pairs): rows of H F decouple.
  if (auto H = parallelotope_matrix(sigma_in)) {
    const double detH = std::abs(H->determinant());
    if (auto Qs = s.ellipsoid_Q()) {
      JacobianResult r;
      r.value = std::sqrt(Qs->determinant()) / detH;
      r.optimizer = H->inverse() * sqrt_spd(*Qs);
      r.certified = true;
      return r;
    }
    if (auto G = max_det_rows_in_ball(s, opts)) {
      JacobianResult r;
      r.value = std::abs(G->determinant()) / detH;
      r.optimizer = H->inverse() * (*G);
      r.certified = true;
      return r;
    }
  }

  // Ellipsoidal s reduces to the John solve of sigma:
  //   J^sigma(s_Q) = J^sigma(|.|) sqrt(det Q) = J^ir(sigma) sqrt(det Q),
  // exact whenever sigma has a facet description.
  if (opts.use_closed_reductions) {
    if (auto Qs = s.ellipsoid_Q()) {
      if (auto Hs = sigma_in.polytope_facet_form()) {
        Ellipsoid john = john_ellipsoid_of_facets(*Hs, opts.mvee_gap_tol, opts.mvee_max_iter);
        JacobianResult r;
        r.value = john.volume() / euclidean_ball_volume(n) * std::sqrt(Qs->determinant());
        // F = (John shape)^{-1/2} = map of the unit ball onto the John
        // ellipsoid, composed with the s -> euclidean change.
        r.optimizer = john.sqrt_A().inverse() * sqrt_spd(*Qs);
        r.certified = true;
        return r;
      }
    }
  }

  // General path: multistart smoothed log-det ascent.
  ContainmentProblem prob;
  prob.n = n;

  // sigma description
  if (auto Hs = sigma_in.polytope_facet_form()) {
    prob.form = ContainmentProblem::SigmaForm::facets;
    prob.sig_facets = *Hs;
  } else if (auto Qs = sigma_in.ellipsoid_Q()) {
    prob.form = ContainmentProblem::SigmaForm::ellipsoid;
    prob.sig_Q = *Qs;
  } else if (const auto* l = std::get_if<SemiNorm::LpNorm>(&sigma_in.repr())) {
    prob.form = ContainmentProblem::SigmaForm::lp;
    prob.sig_p = l->p;
    prob.sig_scales = l->scales;
  } else {
    throw std::invalid_argument(
        "jacobian: sigma must be ellipsoidal, polytopal or lp for the generic solver");
  }

  // B_s description; ellipsoidal s is pre-transformed to the sphere.
  Mat back = Mat::Identity(n, n);  // F_actual = F_solved * back
  double det_back = 1.0;
  auto Qs = s.ellipsoid_Q();
  CrSolution cr;  // Euclidean-optimizer start
  if (Qs) {
    back = sqrt_spd(*Qs);
    det_back = std::sqrt(Qs->determinant());
    if (prob.form == ContainmentProblem::SigmaForm::facets) {
      prob.sphere_mode = true;
    } else {
      prob.points = SemiNorm::euclidean(n).boundary_sample(
          opts.sample_directions ? 4 * opts.sample_directions : 4 * default_direction_count(n));
      prob.points_exact = false;
    }
    cr.value = 1.0;
    cr.F = Mat::Identity(n, n);
  } else if (auto V = s.polytope_vertex_form()) {
    prob.points = *V;
    prob.points_exact = true;
    cr = circumscribed_solution(s, opts);
    back = Mat::Identity(n, n);
  } else {
    prob.points = s.boundary_sample(opts.sample_directions ? 4 * opts.sample_directions
                                                           : 4 * default_direction_count(n));
    prob.points_exact = false;
    cr = circumscribed_solution(s, opts);
  }
  // Multistart: Euclidean optimizer, identity, and fixed-seed random
  // rotations composed with the Euclidean optimizer.
  std::vector<Mat> starts;
  if (Qs) {
    starts.push_back(Mat::Identity(n, n));
  } else {
    starts.push_back(cr.F);
    starts.push_back(Mat::Identity(n, n));
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < opts.ascent_random_starts; ++k) {
    Mat R(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) R(i, j) = gauss(rng);
    Eigen::HouseholderQR<Mat> qr(R);
    Mat Q = qr.householderQ();
    starts.push_back(Q * starts.front());
  }

  Mat best;
  double best_val = -std::numeric_limits<double>::infinity();
  for (const auto& F0 : starts) {
    const double g0 = prob.g_exact(F0);
    if (!(g0 > 0.0) || !std::isfinite(g0)) continue;
    Mat F = ascend(prob, F0 / g0, opts);
    const double g = prob.g_exact(F);
    if (!(g > 0.0)) continue;
    const double val = std::log(std::abs(F.determinant())) - n * std::log(g);
    if (val > best_val) {
      best_val = val;
      best = F / g;
    }
  }
  if (!std::isfinite(best_val)) throw SolverError("jacobian: ascent found no feasible map");

  JacobianResult r;
  r.value = std::abs(best.determinant()) * det_back;
  r.optimizer = best * back;
  // Exact certification: polytopal test points, or the closed-form
  // sup |F' h| over facets in sphere mode.
  r.certified = Qs ? prob.sphere_mode : prob.points_exact;
  return r;
}

double certificate_for(const SemiNorm& sigma, const SemiNorm& s, const Mat& F) {
  double worst = -std::numeric_limits<double>::infinity();
  if (auto V = s.polytope_vertex_form()) {
    for (const auto& v : *V) worst = std::max(worst, sigma(F * v) - 1.0);
    return worst;
  }
  for (const auto& v : s.boundary_sample()) worst = std::max(worst, sigma(F * v) - 1.0);
  return worst;
}

}  // namespace

JacobianResult jacobian(const JacobianKind& kind, const SemiNorm& s, const JacobianOptions& opts) {
  const int n = s.dim();
  auto sigma = kind.resolve_sigma(n);

  if (!s.is_norm()) {
    // Degenerate semi-norms have Jacobian zero by convention.
    return {0.0, std::nullopt, 0.0, true};
  }

  switch (kind.type()) {
    case JacobianKind::Type::busemann: {
      const auto bv = s.ball_volume();
      return {euclidean_ball_volume(n) / bv.value, std::nullopt, 0.0,
              bv.method != VolumeMethod::quadrature};
    }
    case JacobianKind::Type::holmes_thompson: {
      const auto bv = s.polar().ball_volume();
      return {bv.value / euclidean_ball_volume(n), std::nullopt, 0.0,
              bv.method != VolumeMethod::quadrature};
    }
    case JacobianKind::Type::inscribed_riemannian: {
      auto john = john_of_ball(s, opts.mvee_gap_tol);
      return {john.ellipsoid.volume() / euclidean_ball_volume(n), std::nullopt, 0.0, john.exact};
    }
    default: {
      JacobianResult r = generic_jacobian(*sigma, s, opts);
      if (r.optimizer) r.certificate = certificate_for(*sigma, s, *r.optimizer);
      return r;
    }
  }
}

NormalizationCheck normalization_identity(const SemiNorm& sigma, const JacobianOptions& opts) {
  const int n = sigma.dim();
  NormalizationCheck c;
  // The lhs runs the direct determinant ascent so the check exercises
  // two independent solvers (primal ascent vs the Khachiyan dual).
  JacobianOptions direct = opts;
  direct.use_closed_reductions = false;
  c.lhs = jacobian(JacobianKind::generic(sigma), SemiNorm::euclidean(n), direct).value;
  c.rhs = jacobian(JacobianKind::inscribed_riemannian(), sigma, opts).value;
  c.residual = std::abs(c.lhs - c.rhs) / std::max(c.rhs, 1e-300);
  return c;
}

bool dominated_on_grid(const SemiNorm& s, const SemiNorm& s_prime, int directions, double tol) {
  if (s.dim() != s_prime.dim()) throw std::invalid_argument("dominated_on_grid: dim mismatch");
  for (const auto& u : direction_grid(s.dim(), directions)) {
    if (s(u) > s_prime(u) + tol) return false;
  }
  return true;
}

AxiomCheckReport check_axioms(const JacobianKind& kind,
                              const std::vector<std::pair<SemiNorm, Mat>>& samples,
                              double monotonicity_tol, const JacobianOptions& opts) {
  AxiomCheckReport rep;
  rep.contravariant_law_used = !kind.covariant();
  std::vector<double> values(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    const auto& [s, L] = samples[i];
    const double J = jacobian(kind, s, opts).value;
    values[i] = J;
    const double JL = jacobian(kind, SemiNorm::pullback_of(s, L), opts).value;
    const double det = std::abs(L.determinant());
    const double expected = kind.covariant() ? J * det : J / det;
    const double resid = std::abs(JL - expected) / std::max(std::abs(expected), 1e-300);
    rep.max_transformation_residual = std::max(rep.max_transformation_residual, resid);
    ++rep.transformation_checks;
  }
  // Monotonicity over comparable consecutive pairs; the inscribed
  // ratio is antitone, so its check runs reversed.
  for (size_t i = 0; i + 1 < samples.size(); ++i) {
    const auto& a = samples[i].first;
    const auto& b = samples[i + 1].first;
    if (a.dim() != b.dim()) continue;
    int dir = 0;
    if (dominated_on_grid(a, b)) dir = 1;        // a <= b
    else if (dominated_on_grid(b, a)) dir = -1;  // b <= a
    if (dir == 0) continue;
    ++rep.monotone_pairs;
    double lo = dir > 0 ? values[i] : values[i + 1];
    double hi = dir > 0 ? values[i + 1] : values[i];
    if (!kind.covariant()) std::swap(lo, hi);
    if (lo > hi + monotonicity_tol * std::max(1.0, hi)) ++rep.monotonicity_violations;
  }
  return rep;
}

}  // namespace fv
