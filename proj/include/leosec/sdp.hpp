#pragma once

// Small dense complex SDP solver (log-barrier interior point with a phase-I stage).
//
// Problem form, over a Hermitian N x N matrix W and k real scalars x:
//
//   maximize    Re Tr(C W) + q^T x
//   subject to  Re Tr(A_i W) + a_i^T x  (<= | >=)  d_i        linear rows
//               e_j^T x <= log2(1 + Re Tr(B_j W) / sigma_j)    log-rate rows, B_j PSD
//               Tr(W) <= P   (or == P)
//               |x_l| <= scalar_bound
//               W >= 0
//
// The log-rate rows are concave in W, so the feasible set stays convex; they let a
// secrecy-rate surrogate be posed without an outer parametric search.

#include "leosec/core.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <vector>

namespace leosec {

enum class Sense { LessEqual, GreaterEqual };

struct LinearConstraint {
  CMat A;  // empty means zero
  VecX a;  // empty means zero
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

struct LogRateConstraint {
  CMat B;
  double noise = 1.0;
  VecX e;
};

struct SdpProblem {
  int dimension = 0;
  int num_scalars = 0;
  CMat objective;      // C, empty means zero
  VecX objective_scalars;  // q, empty means zero
  std::vector<LinearConstraint> linear;
  std::vector<LogRateConstraint> log_rate;
  double trace_bound = 1.0;
  bool trace_equality = false;
  double scalar_bound = 1e4;
};

struct SdpOptions {
  double tol_feas = 1e-7;
  double tol_gap = 1e-6;
  double tol_psd = 1e-8;
  int max_iter = 400;  // Newton steps per phase
};

enum class SdpStatus { Optimal, Infeasible, MaxIter };

inline const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::MaxIter: return "max_iter";
  }
  return "?";
}

struct SdpSolution {
  CMat W;
  VecX x;
  double objective = -std::numeric_limits<double>::infinity();
  double dual_bound = std::numeric_limits<double>::infinity();  // objective + gap
  SdpStatus status = SdpStatus::MaxIter;
  double primal_residual = 0.0;  // largest constraint violation
  double dual_residual = 0.0;    // Newton decrement at the last centering step
  double gap = 0.0;              // barrier duality-gap bound
  int iterations = 0;
};

/// Nearest PSD matrix in Frobenius norm (eigenvalue clipping).
inline CMat psd_project(const CMat& M) {
  require(M.rows() == M.cols(), "matrix must be square");
  const double scale = std::max(1.0, M.norm());
  require((M - M.adjoint()).norm() <= 1e-10 * scale, "matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(M));
  const VecX lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

inline double lambda_min(const CMat& M) {
  return Eigen::SelfAdjointEigenSolver<CMat>(hermitian_part(M), Eigen::EigenvaluesOnly).eigenvalues()(0);
}

inline double lambda_max(const CMat& M) {
  const auto ev = Eigen::SelfAdjointEigenSolver<CMat>(hermitian_part(M), Eigen::EigenvaluesOnly).eigenvalues();
  return ev(ev.size() - 1);
}

namespace detail {

/// Real orthonormal basis of the N x N Hermitian matrices under <X, Y> = Re Tr(X Y).
class HermitianBasis {
public:
  struct Entry {
    int row, col;
    cdouble value;
  };

  explicit HermitianBasis(int n) : n_(n) {
    const double r = std::sqrt(0.5);
    for (int i = 0; i < n; ++i) elems_.push_back({Entry{i, i, 1.0}, Entry{i, i, 0.0}});
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        elems_.push_back({Entry{i, j, r}, Entry{j, i, r}});
        elems_.push_back({Entry{i, j, cdouble(0, -r)}, Entry{j, i, cdouble(0, r)}});
      }
  }

  int dim() const { return static_cast<int>(elems_.size()); }
  int n() const { return n_; }
  const std::array<Entry, 2>& elem(int a) const { return elems_[a]; }

  /// Coordinates of a Hermitian matrix: z_a = Re Tr(A E_a).
  VecX coords(const CMat& A) const {
    VecX z(dim());
    for (int a = 0; a < dim(); ++a) z[a] = inner(A, a);
    return z;
  }

  double inner(const CMat& A, int a) const {
    const auto& e = elems_[a];
    double s = (A(e[0].col, e[0].row) * e[0].value).real();
    if (e[1].value != cdouble(0.0)) s += (A(e[1].col, e[1].row) * e[1].value).real();
    return s;
  }

  CMat matrix(const VecX& z) const {
    CMat W = CMat::Zero(n_, n_);
    for (int a = 0; a < dim(); ++a) {
      const auto& e = elems_[a];
      W(e[0].row, e[0].col) += z[a] * e[0].value;
      if (e[1].value != cdouble(0.0)) W(e[1].row, e[1].col) += z[a] * e[1].value;
    }
    return W;
  }

private:
  int n_;
  std::vector<std::array<Entry, 2>> elems_;
};

// Normalized problem: rows G y <= h, log rows ex^T x <= log2(1 + b^T z / noise),
// optional equality t^T z = P, and W(z) > 0.
struct Normalized {
  int nz = 0, k = 0;
  MatX G;  // rows x (nz + k)
  VecX h;
  MatX logB;   // nlog x nz
  VecX logNoise;
  MatX logE;   // nlog x k
  std::optional<VecX> equality;  // t over z
  double equality_rhs = 0.0;
  VecX cost;   // maximize cost^T y
  int nvar() const { return nz + k; }
  int degree(int n) const { return static_cast<int>(h.size() + logNoise.size()) + n; }
};

struct Eval {
  bool inside = false;
  double barrier = 0.0;
  double max_f = -std::numeric_limits<double>::infinity();
};

class BarrierEngine {
public:
  BarrierEngine(const HermitianBasis& basis, const Normalized& p) : basis_(basis), p_(p) {}

  Eval evaluate(const VecX& y) const {
    Eval ev;
    const VecX f = row_values(y);
    ev.max_f = f.size() ? f.maxCoeff() : -std::numeric_limits<double>::infinity();
    if (f.size() && ev.max_f >= 0.0) return ev;
    const CMat W = basis_.matrix(y.head(p_.nz));
    Eigen::LLT<CMat> llt(W);
    if (llt.info() != Eigen::Success) return ev;
    const VecX d = llt.matrixLLT().diagonal().real();
    if (d.minCoeff() <= 0.0) return ev;
    ev.inside = true;
    ev.barrier = -2.0 * d.array().log().sum();
    for (Eigen::Index i = 0; i < f.size(); ++i) ev.barrier -= std::log(-f[i]);
    return ev;
  }

  // f_i(y) for all rows then log rows (each <= 0 when feasible).
  VecX row_values(const VecX& y) const {
    const int nl = static_cast<int>(p_.h.size()), ng = static_cast<int>(p_.logNoise.size());
    VecX f(nl + ng);
    if (nl) f.head(nl) = p_.G * y - p_.h;
    for (int j = 0; j < ng; ++j) {
      const double arg = 1.0 + p_.logB.row(j).dot(y.head(p_.nz)) / p_.logNoise[j];
      const double lg = arg > 0.0 ? std::log2(arg) : -std::numeric_limits<double>::infinity();
      f[nl + j] = p_.logE.row(j).dot(y.tail(p_.k)) - lg;
    }
    return f;
  }

  // Gradient and Hessian of t * (-cost^T y) + barrier(y).
  void derivatives(const VecX& y, double t, VecX& g, MatX& H) const {
    const int nv = p_.nvar(), nz = p_.nz;
    g = -t * p_.cost;
    H.setZero(nv, nv);
    const int nl = static_cast<int>(p_.h.size());
    if (nl) {
      const VecX slack = p_.h - p_.G * y;  // > 0
      const VecX inv = slack.cwiseInverse();
      g += p_.G.transpose() * inv;
      H += p_.G.transpose() * inv.cwiseAbs2().asDiagonal() * p_.G;
    }
    for (Eigen::Index j = 0; j < p_.logNoise.size(); ++j) {
      const double denom = p_.logNoise[j] + p_.logB.row(j).dot(y.head(nz));
      const double lg = std::log2(denom / p_.logNoise[j]);
      const double fj = p_.logE.row(j).dot(y.tail(p_.k)) - lg;  // < 0
      VecX grad(nv);
      grad.head(nz) = -p_.logB.row(j).transpose() / (kLn2 * denom);
      grad.tail(p_.k) = p_.logE.row(j).transpose();
      g += grad / (-fj);
      H += grad * grad.transpose() / (fj * fj);
      // Hessian of f_j is b b^T / (ln2 denom^2) on the z block.
      H.topLeftCorner(nz, nz) +=
          p_.logB.row(j).transpose() * p_.logB.row(j) / (kLn2 * denom * denom * (-fj));
    }
    // -log det W
    const CMat W = basis_.matrix(y.head(nz));
    const CMat X = W.llt().solve(CMat::Identity(basis_.n(), basis_.n()));
    for (int a = 0; a < nz; ++a) {
      g[a] -= basis_.inner(X, a);
      const auto& ea = basis_.elem(a);
      for (int b = a; b < nz; ++b) {
        const auto& eb = basis_.elem(b);
        cdouble s = 0.0;
        for (const auto& u : ea) {
          if (u.value == cdouble(0.0)) continue;
          for (const auto& v : eb) {
            if (v.value == cdouble(0.0)) continue;
            s += u.value * v.value * X(v.col, u.row) * X(u.col, v.row);
          }
        }
        H(a, b) += s.real();
        if (b != a) H(b, a) += s.real();
      }
    }
  }

  struct Result {
    VecX y;
    double t = 1.0;
    double decrement = 0.0;
    int iterations = 0;
    bool converged = false;
    bool stopped_early = false;
  };

  template <class StopFn>
  Result run(VecX y, double tol_gap, int max_newton, StopFn&& stop_early) const {
    Result r;
    const int m = p_.degree(basis_.n());
    double t = 1.0;
    const double mu = 20.0;
    VecX g;
    MatX H;
    while (true) {
      // centering
      for (int it = 0; it < 60; ++it) {
        if (r.iterations >= max_newton) {
          r.y = y;
          r.t = t;
          return r;
        }
        ++r.iterations;
        derivatives(y, t, g, H);
        VecX dy = newton_direction(H, g);
        const double lam2 = -g.dot(dy);
        r.decrement = std::sqrt(std::max(0.0, lam2));
        if (lam2 / 2.0 <= 1e-10) break;
        double step = 1.0;
        const double f0 = t * (-p_.cost.dot(y)) + evaluate(y).barrier;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
          const VecX yn = y + step * dy;
          const Eval ev = evaluate(yn);
          if (ev.inside) {
            const double fn = t * (-p_.cost.dot(yn)) + ev.barrier;
            if (fn <= f0 + 0.25 * step * g.dot(dy)) {
              y = yn;
              moved = true;
              break;
            }
          }
          step *= 0.5;
        }
        if (!moved) break;
        if (stop_early(y)) {
          r.y = y;
          r.t = t;
          r.stopped_early = true;
          return r;
        }
      }
      if (static_cast<double>(m) / t < tol_gap) {
        r.converged = true;
        r.y = y;
        r.t = t;
        return r;
      }
      t *= mu;
    }
  }

private:
  VecX newton_direction(const MatX& H, const VecX& g) const {
    if (!p_.equality) {
      Eigen::LDLT<MatX> ldlt(H);
      return ldlt.solve(-g);
    }
    // Equality on the z block: KKT system [H a; a^T 0].
    const int nv = p_.nvar();
    MatX K = MatX::Zero(nv + 1, nv + 1);
    K.topLeftCorner(nv, nv) = H;
    VecX a = VecX::Zero(nv);
    a.head(p_.nz) = *p_.equality;
    K.block(0, nv, nv, 1) = a;
    K.block(nv, 0, 1, nv) = a.transpose();
    VecX rhs = VecX::Zero(nv + 1);
    rhs.head(nv) = -g;
    return K.partialPivLu().solve(rhs).head(nv);
  }

  const HermitianBasis& basis_;
  const Normalized& p_;
};

}  // namespace detail

inline SdpSolution solve_sdp(const SdpProblem& prob, const SdpOptions& opt = {}) {
  const int n = prob.dimension, k = prob.num_scalars;
  require(n >= 1, "SDP dimension must be >= 1");
  require(k >= 0, "num_scalars must be >= 0");
  require(prob.trace_bound > 0.0, "trace bound must be positive");
  auto check_mat = [&](const CMat& A) {
    if (A.size() == 0) return;
    require(A.rows() == n && A.cols() == n, "constraint matrix has wrong dimension");
    require((A - A.adjoint()).norm() <= 1e-10 * std::max(1.0, A.norm()), "constraint matrix is not Hermitian");
  };
  auto check_vec = [&](const VecX& v) {
    require(v.size() == 0 || v.size() == k, "scalar coefficient vector has wrong length");
  };
  check_mat(prob.objective);
  check_vec(prob.objective_scalars);

  const detail::HermitianBasis basis(n);
  const int nz = basis.dim();
  auto coords_or_zero = [&](const CMat& A) { return A.size() ? basis.coords(A) : VecX(VecX::Zero(nz)); };
  auto vec_or_zero = [&](const VecX& v) { return v.size() ? v : VecX(VecX::Zero(k)); };

  // Phase II data (k scalars).
  detail::Normalized p2;
  p2.nz = nz;
  p2.k = k;
  std::vector<VecX> rows;
  std::vector<double> rhs;
  for (const auto& c : prob.linear) {
    check_mat(c.A);
    check_vec(c.a);
    VecX r(nz + k);
    r << coords_or_zero(c.A), vec_or_zero(c.a);
    double d = c.rhs;
    if (c.sense == Sense::GreaterEqual) {
      r = -r;
      d = -d;
    }
    rows.push_back(r);
    rhs.push_back(d);
  }
  const VecX trace_coords = basis.coords(CMat::Identity(n, n));
  const std::size_t problem_rows = rows.size();
  if (!prob.trace_equality) {
    VecX r = VecX::Zero(nz + k);
    r.head(nz) = trace_coords;
    rows.push_back(r);
    rhs.push_back(prob.trace_bound);
  }
  for (int l = 0; l < k; ++l) {
    VecX r = VecX::Zero(nz + k);
    r[nz + l] = 1.0;
    rows.push_back(r);
    rhs.push_back(prob.scalar_bound);
    rows.push_back(-r);
    rhs.push_back(prob.scalar_bound);
  }
  p2.G.resize(static_cast<Eigen::Index>(rows.size()), nz + k);
  p2.h.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    p2.G.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    p2.h[static_cast<Eigen::Index>(i)] = rhs[i];
  }
  const int ng = static_cast<int>(prob.log_rate.size());
  p2.logB.resize(ng, nz);
  p2.logNoise.resize(ng);
  p2.logE.resize(ng, k);
  for (int j = 0; j < ng; ++j) {
    const auto& c = prob.log_rate[j];
    check_mat(c.B);
    check_vec(c.e);
    require(c.noise > 0.0, "log-rate noise must be positive");
    p2.logB.row(j) = coords_or_zero(c.B).transpose();
    p2.logNoise[j] = c.noise;
    p2.logE.row(j) = vec_or_zero(c.e).transpose();
  }
  if (prob.trace_equality) {
    p2.equality = trace_coords;
    p2.equality_rhs = prob.trace_bound;
  }
  p2.cost.resize(nz + k);
  p2.cost << coords_or_zero(prob.objective), vec_or_zero(prob.objective_scalars);

  // Start from a scaled identity, scalars at zero.
  const double alpha = prob.trace_bound / n * (prob.trace_equality ? 1.0 : 0.5);
  VecX y0 = VecX::Zero(nz + k);
  y0.head(nz) = basis.coords(alpha * CMat::Identity(n, n));

  SdpSolution sol;
  detail::BarrierEngine engine2(basis, p2);
  int newton_used = 0;

  // Phase I: relax every problem row and log row by a shared s; minimize s.
  if (!engine2.evaluate(y0).inside) {
    detail::Normalized p1;
    p1.nz = nz;
    p1.k = k + 1;
    p1.G = MatX::Zero(p2.G.rows(), nz + k + 1);
    p1.G.leftCols(nz + k) = p2.G;
    // Scalar bounds (last 2k rows) stay unrelaxed; everything else gets -s.
    const Eigen::Index relaxed = p2.G.rows() - 2 * k;
    p1.G.col(nz + k).head(relaxed).setConstant(-1.0);
    p1.h = p2.h;
    p1.logB = p2.logB;
    p1.logNoise = p2.logNoise;
    p1.logE = MatX::Zero(ng, k + 1);
    p1.logE.leftCols(k) = p2.logE;
    p1.logE.col(k).setConstant(-1.0);
    p1.equality = p2.equality;
    p1.cost = VecX::Zero(nz + k + 1);
    p1.cost[nz + k] = -1.0;
    VecX y1(nz + k + 1);
    const VecX f0 = engine2.row_values(y0);
    double s0 = 1.0;
    for (Eigen::Index i = 0; i < relaxed; ++i) s0 = std::max(s0, f0[i] + 1.0);
    for (Eigen::Index j = 0; j < ng; ++j) s0 = std::max(s0, f0[p2.h.size() + j] + 1.0);
    y1 << y0, s0;
    detail::BarrierEngine engine1(basis, p1);
    const auto r1 = engine1.run(y1, 1e-10, opt.max_iter,
                                [&](const VecX& y) { return y[nz + k] < -1e-9; });
    newton_used += r1.iterations;
    const double s = r1.y[nz + k];
    if (!r1.stopped_early) {
      sol.iterations = newton_used;
      sol.x = r1.y.segment(nz, k);
      sol.W = basis.matrix(r1.y.head(nz));
      sol.primal_residual = std::max(0.0, s);
      sol.status = r1.converged ? SdpStatus::Infeasible : SdpStatus::MaxIter;
      return sol;
    }
    y0 = r1.y.head(nz + k);
  }

  const auto r2 = engine2.run(y0, opt.tol_gap, opt.max_iter, [](const VecX&) { return false; });
  newton_used += r2.iterations;
  sol.iterations = newton_used;
  sol.W = hermitian_part(basis.matrix(r2.y.head(nz)));
  sol.x = r2.y.tail(k);
  sol.objective = p2.cost.dot(r2.y);
  sol.gap = static_cast<double>(p2.degree(n)) / r2.t;
  sol.dual_bound = sol.objective + sol.gap;
  sol.dual_residual = r2.decrement;
  const VecX f = engine2.row_values(r2.y);
  double viol = 0.0;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(problem_rows); ++i) viol = std::max(viol, f[i]);
  for (Eigen::Index j = 0; j < ng; ++j) viol = std::max(viol, f[p2.h.size() + j]);
  viol = std::max({viol, sol.W.trace().real() - prob.trace_bound, -lambda_min(sol.W)});
  sol.primal_residual = std::max(0.0, viol);
  sol.status = r2.converged && sol.primal_residual <= opt.tol_feas ? SdpStatus::Optimal : SdpStatus::MaxIter;
  return sol;
}

}  // namespace leosec
