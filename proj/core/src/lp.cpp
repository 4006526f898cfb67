#include "fv/lp.hpp"

#include <limits>

namespace fv::lp {
namespace {

constexpr double kPivotTol = 1e-11;

// Tableau simplex on  min c'x, Ax = b, x >= 0  with Bland's rule.
// Sizes here are tiny (a handful of rows, tens of columns).
struct Tableau {
  Mat T;  // m x (n+1), last column is the rhs (kept >= 0)
  std::vector<int> basis;
  int m, n;

  Tableau(const Mat& A, const Vec& b) : m(int(A.rows())), n(int(A.cols())) {
    T.resize(m, n + 1);
    T.leftCols(n) = A;
    T.col(n) = b;
    basis.assign(m, -1);
  }

  void pivot(int row, int col) {
    T.row(row) /= T(row, col);
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      const double f = T(i, col);
      if (f != 0.0) T.row(i) -= f * T.row(row);
    }
    basis[row] = col;
  }

  // Minimize cost over columns [0, allowed); returns false when the
  // objective is unbounded below.
  bool run(const Vec& cost, int allowed) {
    const long cap = 50000L + 200L * long(m + n) * long(m + n);
    for (long iter = 0; iter < cap; ++iter) {
      // reduced costs r_j = c_j - c_B' B^{-1} A_j from the tableau
      Vec reduced = cost;
      for (int i = 0; i < m; ++i) {
        const double cb = cost[basis[i]];
        if (cb != 0.0) reduced -= cb * T.row(i).head(n).transpose();
      }
      int enter = -1;
      for (int j = 0; j < allowed; ++j) {
        if (reduced[j] < -kPivotTol) { enter = j; break; }  // Bland
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (T(i, enter) > kPivotTol) {
          const double ratio = T(i, n) / T(i, enter);
          if (ratio < best - 1e-15 ||
              (ratio < best + 1e-15 && (leave < 0 || basis[i] < basis[leave]))) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw SolverError("simplex: iteration cap reached");
  }

  double objective(const Vec& cost) const {
    double v = 0.0;
    for (int i = 0; i < m; ++i) v += cost[basis[i]] * T(i, n);
    return v;
  }
};

}  // namespace

std::optional<Solution> solve_standard_form(const Mat& A_in, const Vec& b_in, const Vec& c) {
  const int m = int(A_in.rows());
  const int n = int(A_in.cols());
  if (b_in.size() != m || c.size() != n) throw std::invalid_argument("lp: shape mismatch");

  // Orient rows so b >= 0, then append artificial variables.
  Mat A = A_in;
  Vec b = b_in;
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0) {
      A.row(i) *= -1.0;
      b[i] = -b[i];
    }
  }
  Mat A1(m, n + m);
  A1.leftCols(n) = A;
  A1.rightCols(m).setIdentity();

  Tableau tab(A1, b);
  for (int i = 0; i < m; ++i) tab.basis[i] = n + i;

  // Phase 1: minimize the artificial sum.
  Vec cost1 = Vec::Zero(n + m);
  cost1.tail(m).setOnes();
  if (!tab.run(cost1, n + m)) throw SolverError("simplex: phase-1 unbounded");
  if (tab.objective(cost1) > 1e-8) return std::nullopt;  // infeasible

  // Drive leftover zero-level artificials out of the basis when a
  // structural pivot exists; rows without one are redundant and the
  // artificial stays basic at zero.
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] >= n) {
      for (int j = 0; j < n; ++j) {
        if (std::abs(tab.T(i, j)) > 1e-9) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase 2: original costs, artificial columns barred from entering.
  Vec cost2 = Vec::Zero(n + m);
  cost2.head(n) = c;
  if (!tab.run(cost2, n)) throw SolverError("simplex: unbounded objective");

  Solution sol;
  sol.x = Vec::Zero(n);
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n) sol.x[tab.basis[i]] = tab.T(i, tab.n);
  }
  sol.objective = c.dot(sol.x);
  return sol;
}

double polytope_gauge(const std::vector<Vec>& vertices, const Vec& x) {
  if (vertices.empty()) throw std::invalid_argument("polytope_gauge: empty vertex list");
  const int n = int(x.size());
  const int m = int(vertices.size());
  const double scale = x.norm();
  if (scale == 0.0) return 0.0;

  Mat A(n, 2 * m);
  for (int j = 0; j < m; ++j) {
    if (vertices[j].size() != n) throw std::invalid_argument("polytope_gauge: dim mismatch");
    A.col(j) = vertices[j];
    A.col(m + j) = -vertices[j];
  }
  const Vec c = Vec::Ones(2 * m);
  auto sol = solve_standard_form(A, x / scale, c);
  if (!sol) return std::numeric_limits<double>::infinity();
  return sol->objective * scale;
}

}  // namespace fv::lp
