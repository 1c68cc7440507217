#pragma once

// Dense two-phase tableau simplex for
//   maximize c^T x  subject to  A x <= b,  x >= 0
// with b of any sign. Entering columns are chosen by most negative reduced cost with
// index tie-breaks; ratio-test ties go to the smaller basic index.

#include "leosec/core.hpp"

#include <limits>
#include <vector>

namespace leosec {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  VecX x;
  double objective = -std::numeric_limits<double>::infinity();
  int pivots = 0;
};

class SimplexSolver {
public:
  SimplexSolver(const MatX& A, const VecX& b, const VecX& c, double eps = 1e-10)
      : m_(static_cast<int>(b.size())), n_(static_cast<int>(c.size())), eps_(eps),
        basis_(m_), nonbasis_(n_ + 1), D_(MatX::Zero(m_ + 2, n_ + 2)) {
    require(A.rows() == m_ && A.cols() == n_, "LP dimensions are inconsistent");
    D_.topLeftCorner(m_, n_) = A;
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      D_(i, n_) = -1.0;
      D_(i, n_ + 1) = b[i];
    }
    for (int j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      D_(m_, j) = -c[j];
    }
    nonbasis_[n_] = -1;
    D_(m_ + 1, n_) = 1.0;
  }

  LpResult solve(int max_pivots = 10000) {
    LpResult res;
    max_pivots_ = max_pivots;
    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (D_(i, n_ + 1) < D_(r, n_ + 1)) r = i;
    if (m_ > 0 && D_(r, n_ + 1) < -eps_) {
      pivot(r, n_);
      const int ph1 = simplex(1);
      if (ph1 < 0) return finish(res, LpStatus::IterationLimit);
      if (D_(m_ + 1, n_ + 1) < -eps_) return finish(res, LpStatus::Infeasible);
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        int s = -1;
        for (int j = 0; j <= n_; ++j)
          if (s == -1 || D_(i, j) < D_(i, s) || (D_(i, j) == D_(i, s) && nonbasis_[j] < nonbasis_[s])) s = j;
        pivot(i, s);
      }
    }
    const int ph2 = simplex(2);
    if (ph2 < 0) return finish(res, LpStatus::IterationLimit);
    if (ph2 == 0) return finish(res, LpStatus::Unbounded);
    res.x = VecX::Zero(n_);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= 0 && basis_[i] < n_) res.x[basis_[i]] = D_(i, n_ + 1);
    res.objective = D_(m_, n_ + 1);
    return finish(res, LpStatus::Optimal);
  }

private:
  LpResult& finish(LpResult& r, LpStatus s) {
    r.status = s;
    r.pivots = pivots_;
    return r;
  }

  void pivot(int r, int s) {
    const double inv = 1.0 / D_(r, s);
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      const double f = D_(i, s) * inv;
      if (f == 0.0) continue;
      for (int j = 0; j < n_ + 2; ++j)
        if (j != s) D_(i, j) -= D_(r, j) * f;
    }
    for (int j = 0; j < n_ + 2; ++j)
      if (j != s) D_(r, j) *= inv;
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r) D_(i, s) *= -inv;
    D_(r, s) = inv;
    std::swap(basis_[r], nonbasis_[s]);
    ++pivots_;
  }

  // 1: optimal, 0: unbounded, -1: pivot budget exhausted.
  int simplex(int phase) {
    const int x = phase == 1 ? m_ + 1 : m_;
    while (true) {
      if (pivots_ >= max_pivots_) return -1;
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasis_[j] == -1) continue;
        if (s == -1 || D_(x, j) < D_(x, s) || (D_(x, j) == D_(x, s) && nonbasis_[j] < nonbasis_[s])) s = j;
      }
      if (s == -1 || D_(x, s) > -eps_) return 1;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (D_(i, s) < eps_) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = D_(i, n_ + 1) / D_(i, s), rhs = D_(r, n_ + 1) / D_(r, s);
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[r])) r = i;
      }
      if (r == -1) return 0;
      pivot(r, s);
    }
  }

  int m_, n_;
  double eps_;
  std::vector<int> basis_, nonbasis_;
  MatX D_;
  int pivots_ = 0;
  int max_pivots_ = 10000;
};

inline LpResult solve_lp(const MatX& A, const VecX& b, const VecX& c, int max_pivots = 10000) {
  return SimplexSolver(A, b, c).solve(max_pivots);
}

}  // namespace leosec
