#pragma once

#include "fv/expression.hpp"
#include "fv/finsler.hpp"

namespace fv {

/// Multiplicity function theta_i on a chart domain: a constant,
/// piecewise constants on sub-boxes, or a closed-form expression.
class Multiplicity {
 public:
  static Multiplicity constant(double c);
  static Multiplicity piecewise(std::vector<std::pair<quad::Box, double>> pieces);
  static Multiplicity expression(expr::Expression e);
  static Multiplicity function(std::function<double(const Vec&)> f);

  double operator()(const Vec& p) const;

 private:
  std::variant<double, std::vector<std::pair<quad::Box, double>>, expr::Expression,
               std::function<double(const Vec&)>>
      data_;
};

/// Lipschitz map spec for test maps pi: target space -> R^n and for
/// push-forward maps. Linear specs carry their matrix so composed
/// differentials and Lipschitz constants stay exact.
class MapSpec {
 public:
  static MapSpec identity(int dim);
  static MapSpec linear(Mat M);
  static MapSpec expressions(std::vector<expr::Expression> comps, int in_dim);
  static MapSpec function(std::function<Vec(const Vec&)> f, int in_dim, int out_dim);

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  Vec operator()(const Vec& x) const;
  std::optional<Mat> linear_matrix() const { return linear_; }
  Mat differential(const Vec& x, double h) const;

  /// pi scaled by 1/lambda.
  MapSpec scaled(double inv_lambda) const;
  /// this composed after g (this o g).
  MapSpec after(const MapSpec& g) const;

 private:
  int in_dim_ = 0, out_dim_ = 0;
  std::function<Vec(const Vec&)> eval_;
  std::optional<Mat> linear_;
  std::vector<expr::Expression> exprs_;
};

/// Bounded scalar test functions f: constants, expressions, or box
/// indicators (the bounded Borel extension used by mass duality).
class ScalarSpec {
 public:
  static ScalarSpec constant(double c);
  static ScalarSpec expression(expr::Expression e);
  static ScalarSpec indicator(BoxUnion region, double value = 1.0);

  double operator()(const Vec& x) const;

 private:
  struct Indicator {
    BoxUnion region;
    double value;
  };
  std::variant<double, expr::Expression, Indicator> data_;
};

struct TestForm {
  ScalarSpec f;
  MapSpec pi;
  std::optional<double> l_sigma;  // cached L^sigma(pi)
};

/// Rectifiable current at desk scale: an atlas with one multiplicity
/// per chart and the norm sigma defining the Lipschitz norm L^sigma.
struct DeskCurrent {
  Atlas atlas;
  std::vector<Multiplicity> theta;
  SemiNorm sigma;
  BoxUnion support_mask = BoxUnion::all();  // restriction predicate in the target

  int dim() const { return atlas.domain_dim(); }
};

DeskCurrent validate_current(DeskCurrent T);

struct MassResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// T(f, pi) = sum_i int theta_i(p) f(phi_i(p)) det D_p(pi o phi_i) dp.
double evaluate(const DeskCurrent& T, const TestForm& w, int quad_points_per_axis = 64);

/// L^sigma(pi) = Lip of pi into (R^n, sigma) from (R^m, source_norm):
/// sup over sample points of the operator norm of the differential.
/// Exact for linear pi over polytopal or ellipsoidal source norms.
double lipschitz_norm(const MapSpec& pi, const SemiNorm& sigma, const SemiNorm& source_norm,
                      const quad::Box& sample_box, int samples_per_axis = 8);

/// ||T||(A) by the mass formula: sum_i int |theta_i| J^sigma(md phi_i).
MassResult mass_by_formula(const DeskCurrent& T, const BoxUnion& A, int quad_points_per_axis = 128,
                           const JacobianOptions& opts = {});

/// Duality lower bound: max over candidates pi (rescaled to
/// L^sigma(pi) <= 1) of the sign-partition sum of |T(1_cell, pi)|.
struct DualityResult {
  double value = 0.0;
  int best_candidate = -1;
};
DualityResult mass_by_duality(const DeskCurrent& T, const BoxUnion& A, int partitions_per_axis,
                              const std::vector<MapSpec>& candidates,
                              int quad_points_per_axis = 128);

/// Optimal test map pi* = F* o M^{-1} for a full-dimensional linear
/// chart, built from the Jacobian optimizer.
MapSpec optimal_test_map(const DeskCurrent& T, int chart_index = 0,
                         const JacobianOptions& opts = {});

/// Classical mass (the L^infty mass of the usual current definition),
/// evaluated by duality with coordinatewise-rescaled candidates.
double classical_mass_by_duality(const DeskCurrent& T, const BoxUnion& A, int partitions_per_axis,
                                 std::vector<MapSpec> candidates, int quad_points_per_axis = 128);

/// Masses for sigma (normalized so J^sigma(euclidean) = 1), l2 and
/// linf, plus the comparison chains
///   m_2 <= m_sigma <= n^n m_2   and   C^{-1} m_sigma <= m_inf <= C m_sigma.
struct MassComparison {
  double m_inf = 0.0, m_sigma = 0.0, m_2 = 0.0;
  double c = 0.0;  // n^n
  bool chain_l2_ok = false;
  bool chain_linf_ok = false;
  std::string witness;  // set when a chain fails
};
MassComparison compare_masses(const DeskCurrent& T, const BoxUnion& A,
                              int quad_points_per_axis = 128, const JacobianOptions& opts = {});

/// phi_# T: charts composed with g into a new normed target.
DeskCurrent pushforward(const DeskCurrent& T, const MapSpec& g, SemiNorm new_target_norm);

/// T restricted to A: multiplicities masked by 1_A(phi_i(p)).
DeskCurrent restrict(const DeskCurrent& T, const BoxUnion& A);

/// Right-hand side of the finite-mass axiom for one form:
///   L^sigma(pi)^n * sum_i int |theta_i f(phi_i)| J^sigma(md phi_i).
MassResult axiom3_bound(const DeskCurrent& T, const TestForm& w, int quad_points_per_axis = 128,
                        const JacobianOptions& opts = {});

/// The truncation family psi_m applied to coordinate `coord` of pi:
/// flattens |psi| <= 1/m to zero, shifting the rest toward zero.
MapSpec truncate_coordinate(const MapSpec& pi, int coord, double m);

}  // namespace fv
