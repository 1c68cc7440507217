#pragma once

// Per-slot beamforming: semidefinite relaxation with successive linearization of the
// eavesdropper rates, then rank-one recovery by eigendecomposition and Gaussian
// randomization.

#include "leosec/channel.hpp"
#include "leosec/sdp.hpp"

#include <optional>
#include <random>

namespace leosec {

/// Affine function W -> constant + Re Tr(gradient * W).
struct AffineBound {
  double constant = 0.0;
  CMat gradient;

  double operator()(const CMat& W) const {
    return constant + (gradient.cwiseProduct(W.transpose())).sum().real();
  }
};

/// log2(1 + Re Tr(S W) / noise).
inline double log_rate(const CMat& S, const CMat& W, double noise) {
  return std::log2(1.0 + std::max(0.0, (S * W).trace().real()) / noise);
}

/// First-order upper bound of the concave rate log2(1 + Tr(S W)/noise) at W0. Tight at W0.
inline AffineBound eaves_rate_upper_bound(const CMat& W0, const CMat& S, double noise) {
  require(noise > 0.0, "noise power must be positive");
  require(W0.rows() == S.rows() && W0.cols() == S.cols(), "W0 and S dimensions differ");
  const double tr0 = std::max(0.0, (S * W0).trace().real());
  AffineBound b;
  const double g = 1.0 / (kLn2 * (noise + tr0));
  b.gradient = g * S;
  b.constant = std::log2(1.0 + tr0 / noise) - g * tr0;
  return b;
}

struct BeamformingConfig {
  double p_max = 10.0;       // W
  double c_min = 0.01;       // bit/s/Hz
  double sca_tol = 1e-5;     // stop when |delta tau| falls below
  int max_sca_iterations = 20;  // I_W
  int randomization_trials = 50;
  bool multistart = true;    // also start from the scaled identity and the generalized eigenvector
  double verify_tol = 1e-6;  // allowed violation of the unlinearized eavesdropper constraint
  SdpOptions sdp{1e-7, 1e-9, 1e-8, 400};
};

enum class BeamStatus { Optimal, CminInfeasible, SolverFailure };

inline const char* to_string(BeamStatus s) {
  switch (s) {
    case BeamStatus::Optimal: return "optimal";
    case BeamStatus::CminInfeasible: return "cmin_infeasible";
    case BeamStatus::SolverFailure: return "solver_failure";
  }
  return "?";
}

struct ScaTracePoint {
  int iteration;
  double tau;
  double feasibility_residual;  // max_m f_{E,m}(W) - r_E, <= 0 when the true constraint holds
};

struct SlotBeamResult {
  CMat W;            // relaxed covariance, watts
  double tau = 0.0;  // secrecy surrogate, bit/s/Hz
  double r_E = 0.0;
  BeamStatus status = BeamStatus::Optimal;
  std::vector<ScaTracePoint> trace;  // iterations of the start that produced W
  int sdp_solves = 0;                // over all starts
};

/// Per-link matrices scaled so that the slot problem is posed over W / P_max with unit noise.
struct NormalizedSlot {
  CMat legit;               // a_L P s_L s_L^H
  std::vector<CMat> eaves;  // a_m P s_m s_m^H
};

inline NormalizedSlot normalize_slot(const SlotScene& scene, const ArrayGeometry& geometry,
                                     double p_max) {
  auto outer = [&](const Link& l) {
    const CVec s = steering_vector(l.b_tilde, geometry);
    return CMat(l.snr_scale() * p_max * (s * s.adjoint()));
  };
  NormalizedSlot ns;
  ns.legit = outer(scene.serving);
  for (const auto& e : scene.eavesdroppers) ns.eaves.push_back(outer(e));
  return ns;
}

namespace detail {

/// SCA iterations on the normalized slot problem from the expansion point W0 (trace <= 1).
/// Returns W in normalized units.
inline SlotBeamResult sca_from_start(const NormalizedSlot& ns, int n, CMat W0, const BeamformingConfig& cfg) {
  const int m = static_cast<int>(ns.eaves.size());
  SlotBeamResult res;
  double prev_tau = -std::numeric_limits<double>::infinity();
  CMat best_W = W0;
  double best_tau = -std::numeric_limits<double>::infinity(), best_rE = 0.0;
  bool extra_round_used = false;

  for (int it = 1; it <= cfg.max_sca_iterations + 1; ++it) {
    SdpProblem prob;
    prob.dimension = n;
    prob.num_scalars = m > 0 ? 2 : 1;
    prob.trace_bound = 1.0;
    prob.objective_scalars = VecX::Zero(prob.num_scalars);
    prob.objective_scalars[0] = 1.0;
    // tau + r_E <= log2(1 + Tr(S_L W))
    prob.log_rate.push_back({ns.legit, 1.0, VecX::Ones(prob.num_scalars)});
    // linearized eavesdropper rates: bound_m(W) - r_E <= 0
    for (int e = 0; e < m; ++e) {
      const AffineBound b = eaves_rate_upper_bound(W0, ns.eaves[e], 1.0);
      VecX a(2);
      a << 0.0, -1.0;
      prob.linear.push_back({b.gradient, a, Sense::LessEqual, -b.constant});
    }
    const SdpSolution sol = solve_sdp(prob, cfg.sdp);
    if (sol.status == SdpStatus::Infeasible || !sol.W.allFinite()) {
      res.status = BeamStatus::SolverFailure;
      break;
    }
    const double tau = sol.x[0];
    const double rE = m > 0 ? sol.x[1] : 0.0;
    double resid = -std::numeric_limits<double>::infinity();
    for (int e = 0; e < m; ++e) resid = std::max(resid, log_rate(ns.eaves[e], sol.W, 1.0) - rE);
    res.trace.push_back({it, tau, m > 0 ? resid : 0.0});

    if (tau >= best_tau) {
      best_tau = tau;
      best_W = sol.W;
      best_rE = rE;
    }
    const bool converged = std::abs(tau - prev_tau) < cfg.sca_tol;
    prev_tau = tau;
    W0 = sol.W;
    if (converged || it >= cfg.max_sca_iterations) {
      // One extra re-linearization when the unlinearized constraint is off.
      if (m > 0 && resid > cfg.verify_tol && !extra_round_used) {
        extra_round_used = true;
        continue;
      }
      break;
    }
  }

  res.W = hermitian_part(best_W);
  res.tau = best_tau;
  res.r_E = best_rE;
  res.sdp_solves = static_cast<int>(res.trace.size());
  return res;
}

/// Unit-trace principal generalized eigenvector of (I + S_L, I + S_E) for the eavesdropper
/// with the largest gain; the exact relaxed optimum when there is one eavesdropper.
inline CMat generalized_eigen_start(const NormalizedSlot& ns, int n) {
  std::size_t k = 0;
  for (std::size_t e = 1; e < ns.eaves.size(); ++e)
    if (ns.eaves[e].trace().real() > ns.eaves[k].trace().real()) k = e;
  const CMat I = CMat::Identity(n, n);
  Eigen::GeneralizedSelfAdjointEigenSolver<CMat> es(I + ns.legit, I + ns.eaves[k]);
  CVec v = es.eigenvectors().col(n - 1);
  v /= v.norm();
  return v * v.adjoint();
}

}  // namespace detail

/// SCA on the relaxed slot problem starting from the expansion point (watts). Without an
/// explicit expansion the MRT covariance P s_L s_L^H / N is used. With cfg.multistart the
/// scaled identity and the generalized eigenvector are also tried and the largest tau is kept;
/// ties go to the earlier start.
inline SlotBeamResult solve_beamforming_slot(const SlotScene& scene, const ArrayGeometry& geometry,
                                             const BeamformingConfig& cfg,
                                             std::optional<CMat> expansion = std::nullopt) {
  require(cfg.p_max > 0.0, "p_max must be positive");
  require(cfg.max_sca_iterations >= 1, "max_sca_iterations must be >= 1");
  const int n = geometry.size();
  const NormalizedSlot ns = normalize_slot(scene, geometry, cfg.p_max);

  std::vector<CMat> starts;
  if (expansion) {
    require(expansion->rows() == n && expansion->cols() == n, "expansion point has wrong size");
    starts.push_back(hermitian_part(*expansion) / cfg.p_max);
  } else {
    const CVec s = steering_vector(scene.serving.b_tilde, geometry);
    starts.push_back((s * s.adjoint()) / static_cast<double>(n));
  }
  if (cfg.multistart && !ns.eaves.empty()) {
    starts.push_back(CMat::Identity(n, n) / static_cast<double>(n));
    starts.push_back(detail::generalized_eigen_start(ns, n));
  }

  std::optional<SlotBeamResult> best;
  SlotBeamResult failed;
  int solves = 0;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    SlotBeamResult r = detail::sca_from_start(ns, n, starts[k], cfg);
    solves += r.sdp_solves;
    if (r.status == BeamStatus::SolverFailure) {
      if (k == 0) failed = std::move(r);
      continue;
    }
    if (!best || r.tau > best->tau + cfg.sca_tol) best = std::move(r);
  }
  SlotBeamResult res = best ? std::move(*best) : std::move(failed);
  res.sdp_solves = solves;
  res.W = cfg.p_max * res.W;
  if (res.status != BeamStatus::SolverFailure && res.tau < cfg.c_min) res.status = BeamStatus::CminInfeasible;
  return res;
}

struct RankOneResult {
  Beamformer bf;
  SlotRates rates;
  bool meets_cmin = false;
  bool rank_one = false;  // principal-eigenvector shortcut taken
  int trials = 0;
};

/// Recovers a full-power beamformer from a relaxed covariance W (watts).
inline RankOneResult randomize_rank_one(const CMat& W, const SlotScene& scene,
                                        const ArrayGeometry& geometry, double p_max, double c_min,
                                        int num_trials, std::mt19937_64& rng) {
  require(W.rows() == geometry.size() && W.cols() == geometry.size(), "W has wrong size");
  require(num_trials >= 0, "num_trials must be >= 0");
  const int n = geometry.size();
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(W));
  const VecX lam = es.eigenvalues().cwiseMax(0.0);  // ascending
  const CMat& U = es.eigenvectors();
  const double l1 = lam[n - 1];
  require(l1 > 0.0, "relaxed covariance is zero");

  auto scaled = [&](const CVec& v) { return Beamformer{std::sqrt(p_max) * v / v.norm()}; };

  RankOneResult best;
  bool have = false;
  auto consider = [&](const Beamformer& bf) {
    const SlotRates r = secrecy_rate(scene, geometry, bf);
    const bool ok = r.secrecy >= c_min;
    // Feasible candidates beat infeasible ones; then larger unclamped margin wins.
    const bool better = !have || (ok && !best.meets_cmin) ||
                        (ok == best.meets_cmin && r.margin > best.rates.margin);
    if (better) {
      best.bf = bf;
      best.rates = r;
      best.meets_cmin = ok;
      have = true;
    }
  };

  consider(scaled(U.col(n - 1)));
  const double l2 = n >= 2 ? lam[n - 2] : 0.0;
  if (l2 / l1 < 1e-6) {
    best.rank_one = true;
    return best;
  }

  const CMat factor = U * lam.cwiseSqrt().asDiagonal();
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  for (int t = 0; t < num_trials; ++t) {
    CVec r(n);
    for (int i = 0; i < n; ++i) r[i] = cdouble(gauss(rng), gauss(rng));
    const CVec v = factor * r;
    if (v.norm() == 0.0) continue;
    consider(scaled(v));
    ++best.trials;
  }
  return best;
}

}  // namespace leosec
