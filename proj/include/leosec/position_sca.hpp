#pragma once

// Antenna-position update by successive convex approximation: log-sum-exp smoothing of
// the strongest eavesdropper, closed-form position gradients, linearized secrecy and
// spacing constraints, and a trust-region linear program.

#include "leosec/channel.hpp"
#include "leosec/lp.hpp"

#include <span>

namespace leosec {

/// mu * ln(sum_m exp(A_m / mu)); -inf for an empty set.
inline double smoothed_eaves_rate(std::span<const double> rates, double mu) {
  require(mu > 0.0, "smoothing parameter must be positive");
  if (rates.empty()) return -std::numeric_limits<double>::infinity();
  double mx = rates[0];
  for (double a : rates) mx = std::max(mx, a);
  double s = 0.0;
  for (double a : rates) s += std::exp((a - mx) / mu);
  return mx + mu * std::log(s);
}

/// Softmax weights exp(A_m/mu) / sum_i exp(A_i/mu).
inline VecX softmax_weights(std::span<const double> rates, double mu) {
  require(mu > 0.0, "smoothing parameter must be positive");
  VecX w(static_cast<Eigen::Index>(rates.size()));
  if (rates.empty()) return w;
  double mx = rates[0];
  for (double a : rates) mx = std::max(mx, a);
  for (std::size_t i = 0; i < rates.size(); ++i) w[static_cast<Eigen::Index>(i)] = std::exp((rates[i] - mx) / mu);
  return w / w.sum();
}

inline std::vector<CMat> covariances(const BeamPlan& plan) {
  std::vector<CMat> out;
  out.reserve(plan.size());
  for (const auto& b : plan) out.push_back(b.w * b.w.adjoint());
  return out;
}

struct LinkRateGradient {
  double rate = 0.0;  // A_chi
  VecX gradient;      // dA_chi / dc, length 2N
};

/// Rate of one link under covariance W and its gradient in the antenna positions.
inline LinkRateGradient link_rate_gradient(const Link& link, const ArrayGeometry& geometry,
                                           const CMat& W) {
  const int n = geometry.size();
  const CVec s = steering_vector(link.b_tilde, geometry);
  const CVec Ws = W * s;
  const double u = std::max(0.0, s.dot(Ws).real());
  const double a = link.snr_scale();
  const double coef = 2.0 * a / (kLn2 * (1.0 + a * u));
  const Vec2 k = link.horizontal();
  LinkRateGradient r;
  r.rate = std::log2(1.0 + a * u);
  r.gradient.resize(2 * n);
  for (int i = 0; i < n; ++i) {
    const double im = (std::conj(s[i]) * Ws[i]).imag();
    r.gradient.segment<2>(2 * i) = coef * im * k;
  }
  return r;
}

/// Smoothed per-slot margin A_L - A~_E and its gradient (A_L alone when M = 0).
struct SmoothedSlot {
  double legit = 0.0;
  double smoothed_eaves = -std::numeric_limits<double>::infinity();
  double value = 0.0;
  VecX gradient;
};

inline SmoothedSlot smoothed_slot(const SlotScene& scene, const ArrayGeometry& geometry,
                                  const CMat& W, double mu) {
  require(W.rows() == geometry.size() && W.cols() == geometry.size(), "W has wrong size");
  const LinkRateGradient L = link_rate_gradient(scene.serving, geometry, W);
  SmoothedSlot out;
  out.legit = L.rate;
  out.value = L.rate;
  out.gradient = L.gradient;
  if (scene.eavesdroppers.empty()) return out;
  std::vector<double> rates;
  std::vector<VecX> grads;
  for (const auto& e : scene.eavesdroppers) {
    auto g = link_rate_gradient(e, geometry, W);
    rates.push_back(g.rate);
    grads.push_back(std::move(g.gradient));
  }
  out.smoothed_eaves = smoothed_eaves_rate(rates, mu);
  out.value -= out.smoothed_eaves;
  const VecX w = softmax_weights(rates, mu);
  for (std::size_t m = 0; m < grads.size(); ++m) out.gradient -= w[static_cast<Eigen::Index>(m)] * grads[m];
  return out;
}

/// Smoothed average objective (1/P) sum_p (A_L - A~_E).
inline double smoothed_objective(const std::vector<SlotScene>& scenes, const ArrayGeometry& geometry,
                                 const std::vector<CMat>& Ws, double mu) {
  require(Ws.size() == scenes.size(), "covariance and scene counts differ");
  double s = 0.0;
  for (std::size_t p = 0; p < scenes.size(); ++p) s += smoothed_slot(scenes[p], geometry, Ws[p], mu).value;
  return s / static_cast<double>(scenes.size());
}

/// Gradient of the smoothed average secrecy rate in the stacked positions.
inline VecX position_gradient(const std::vector<SlotScene>& scenes, const ArrayGeometry& geometry,
                              const std::vector<CMat>& Ws, double mu) {
  require(Ws.size() == scenes.size(), "covariance and scene counts differ");
  require(!scenes.empty(), "at least one slot is required");
  VecX g = VecX::Zero(geometry.c.size());
  for (std::size_t p = 0; p < scenes.size(); ++p) g += smoothed_slot(scenes[p], geometry, Ws[p], mu).gradient;
  return g / static_cast<double>(scenes.size());
}

inline VecX position_gradient(const std::vector<SlotScene>& scenes, const ArrayGeometry& geometry,
                              const BeamPlan& plan, double mu) {
  return position_gradient(scenes, geometry, covariances(plan), mu);
}

/// value + gradient^T (c - center) >= rhs
struct AffineCut {
  VecX center;
  double value = 0.0;
  VecX gradient;
  double rhs = 0.0;

  double lhs(const VecX& c) const { return value + gradient.dot(c - center); }
  double slack(const VecX& c) const { return lhs(c) - rhs; }
};

/// One cut per slot: A_L - A~_E linearized at the current positions, bounded below by C_min.
inline std::vector<AffineCut> linearize_secrecy_constraint(const std::vector<SlotScene>& scenes,
                                                           const ArrayGeometry& geometry,
                                                           const std::vector<CMat>& Ws, double mu,
                                                           double c_min) {
  require(Ws.size() == scenes.size(), "covariance and scene counts differ");
  std::vector<AffineCut> cuts;
  for (std::size_t p = 0; p < scenes.size(); ++p) {
    const SmoothedSlot s = smoothed_slot(scenes[p], geometry, Ws[p], mu);
    cuts.push_back({geometry.c, s.value, s.gradient, c_min});
  }
  return cuts;
}

/// direction^T (c_n - c_m) >= d_min, the convex lower bound of ||c_n - c_m|| at the current point.
struct SpacingCut {
  int n = 0, m = 0;
  Vec2 direction;
  double rhs = 0.0;

  double lhs(const VecX& c) const { return direction.dot(c.segment<2>(2 * n) - c.segment<2>(2 * m)); }
};

inline std::vector<SpacingCut> linearize_spacing(const ArrayGeometry& geometry) {
  std::vector<SpacingCut> cuts;
  for (int n = 0; n < geometry.size(); ++n)
    for (int m = n + 1; m < geometry.size(); ++m) {
      const Vec2 d = geometry.position(n) - geometry.position(m);
      const double len = d.norm();
      if (!(len > 0.0)) throw DegenerateGeometry("coincident antennas cannot be linearized");
      cuts.push_back({n, m, d / len, geometry.min_spacing});
    }
  return cuts;
}

struct ScaConfig {
  double mu = 0.05;
  double c_min = 0.01;
  double wavelength = kSpeedOfLight / 12e9;
  double trust_init = 0.25;  // in wavelengths
  double trust_min = 1e-4;   // in wavelengths
  double trust_max = 1.0;    // in wavelengths
  int max_shrinks = 5;
  double grow = 1.5;
  double slack_penalty = 1e3;
  int steps_per_block = 5;   // I_C
  bool max_model_fallback = true;  // retry with the piecewise-linear max model when every smoothed step is rejected
};

struct ScaState {
  ArrayGeometry geometry;
  double trust_radius = 0.0;  // meters
  int iteration = 0;
  double objective = 0.0;     // true average secrecy rate at geometry

  static ScaState start(const ArrayGeometry& g, const ScaConfig& cfg, double objective) {
    return {g, cfg.trust_init * cfg.wavelength, 0, objective};
  }
};

struct ScaStepResult {
  bool accepted = false;
  bool stalled = false;   // LP infeasible or zero step
  double objective = 0.0;
  double step_norm = 0.0;  // infinity norm, meters
  double slack = 0.0;
  double max_violation = 0.0;  // box and spacing, meters
  int shrinks = 0;
  int lp_solves = 0;
  bool fallback = false;  // max model used
};

struct ScaTraceRow {
  int iteration;
  double objective;
  double trust_radius;
  double step_norm;
  double max_violation;
};

/// First-order model of one slot's unsmoothed margin: A_L + gL^T d - max_m (A_E,m + gE,m^T d).
struct MaxLinearSlot {
  VecX legit;               // gradient of A_L
  std::vector<VecX> eaves;  // gradients of A_E,m
  VecX offsets;             // A_E,m - max_i A_E,i
};

/// Per-slot max models; slots whose margin is already clamped to zero are left out.
inline std::vector<MaxLinearSlot> max_linear_model(const std::vector<SlotScene>& scenes,
                                                   const ArrayGeometry& geometry,
                                                   const std::vector<CMat>& Ws) {
  require(Ws.size() == scenes.size(), "covariance and scene counts differ");
  std::vector<MaxLinearSlot> out;
  for (std::size_t p = 0; p < scenes.size(); ++p) {
    const LinkRateGradient L = link_rate_gradient(scenes[p].serving, geometry, Ws[p]);
    MaxLinearSlot slot;
    slot.legit = L.gradient;
    std::vector<double> rates;
    for (const auto& e : scenes[p].eavesdroppers) {
      auto g = link_rate_gradient(e, geometry, Ws[p]);
      rates.push_back(g.rate);
      slot.eaves.push_back(std::move(g.gradient));
    }
    const double mx = rates.empty() ? 0.0 : *std::max_element(rates.begin(), rates.end());
    if (L.rate - mx <= 0.0) continue;
    slot.offsets.resize(static_cast<Eigen::Index>(rates.size()));
    for (std::size_t m = 0; m < rates.size(); ++m) slot.offsets[static_cast<Eigen::Index>(m)] = rates[m] - mx;
    out.push_back(std::move(slot));
  }
  return out;
}

/// Solves the trust-region LP around `center` and returns the displacement (meters).
/// Slots whose cut is violated at the center share one penalized slack. With a max model
/// the objective is (1/P) sum_p (gL^T d - t_p) with t_p above every linearized eavesdropper
/// rate, and objective_grad is ignored.
inline std::optional<std::pair<VecX, double>> solve_position_lp(
    const ArrayGeometry& center, const VecX& objective_grad, const std::vector<AffineCut>& secrecy,
    const std::vector<SpacingCut>& spacing, double radius, double penalty,
    const std::vector<MaxLinearSlot>* model = nullptr, std::size_t num_slots = 1) {
  const int nc = static_cast<int>(center.c.size());
  const double scale = center.region_side;  // LP works in units of the region side
  VecX lo(nc), hi(nc);
  for (int k = 0; k < nc; ++k) {
    lo[k] = std::max(-radius, -center.c[k]) / scale;
    hi[k] = std::min(radius, center.region_side - center.c[k]) / scale;
    lo[k] = std::min(lo[k], 0.0);
    hi[k] = std::max(hi[k], 0.0);
  }
  bool need_slack = false;
  for (const auto& cut : secrecy) need_slack |= cut.value < cut.rhs;

  // Variables: plus part (nc), minus part (nc), optional slack, then t_p = t+ - t- per
  // modeled slot with eavesdroppers.
  int epi = 0, epi_rows = 0;
  if (model)
    for (const auto& m : *model)
      if (!m.eaves.empty()) {
        ++epi;
        epi_rows += static_cast<int>(m.eaves.size());
      }
  const int base = 2 * nc + (need_slack ? 1 : 0);
  const int nv = base + 2 * epi;
  const int rows = 2 * nc + static_cast<int>(secrecy.size() + spacing.size()) + epi_rows;
  MatX A = MatX::Zero(rows, nv);
  VecX b = VecX::Zero(rows);
  VecX c = VecX::Zero(nv);
  int r = 0;
  for (int k = 0; k < nc; ++k) {
    A(r, k) = 1.0;
    b[r++] = hi[k];
    A(r, nc + k) = 1.0;
    b[r++] = -lo[k];
  }
  for (const auto& cut : secrecy) {
    // value + g^T d >= rhs  ->  -g^T d (- s) <= value - rhs
    for (int k = 0; k < nc; ++k) {
      A(r, k) = -cut.gradient[k] * scale;
      A(r, nc + k) = cut.gradient[k] * scale;
    }
    if (need_slack && cut.value < cut.rhs) A(r, 2 * nc) = -1.0;
    b[r++] = cut.value - cut.rhs;
  }
  for (const auto& cut : spacing) {
    // dir^T (d_n - d_m) >= rhs - dist
    const double dist = cut.lhs(center.c);
    for (int j = 0; j < 2; ++j) {
      const double dn = cut.direction[j] * scale;
      A(r, 2 * cut.n + j) -= dn;
      A(r, nc + 2 * cut.n + j) += dn;
      A(r, 2 * cut.m + j) += dn;
      A(r, nc + 2 * cut.m + j) -= dn;
    }
    b[r++] = dist - cut.rhs;
  }
  VecX g = objective_grad;
  if (model) {
    const double inv = 1.0 / static_cast<double>(std::max<std::size_t>(num_slots, 1));
    g = VecX::Zero(nc);
    int t = base;
    for (const auto& m : *model) {
      g += inv * m.legit;
      if (m.eaves.empty()) continue;
      for (std::size_t e = 0; e < m.eaves.size(); ++e) {
        // gE^T d + offset - t <= 0
        for (int k = 0; k < nc; ++k) {
          A(r, k) = m.eaves[e][k] * scale;
          A(r, nc + k) = -m.eaves[e][k] * scale;
        }
        A(r, t) = -1.0;
        A(r, t + 1) = 1.0;
        b[r++] = -m.offsets[static_cast<Eigen::Index>(e)];
      }
      c[t] = -inv;
      c[t + 1] = inv;
      t += 2;
    }
  }
  for (int k = 0; k < nc; ++k) {
    c[k] = g[k] * scale;
    c[nc + k] = -g[k] * scale;
  }
  if (need_slack) c[2 * nc] = -penalty;

  const LpResult lp = solve_lp(A, b, c);
  if (lp.status != LpStatus::Optimal) return std::nullopt;
  VecX d = (lp.x.head(nc) - lp.x.segment(nc, nc)) * scale;
  return std::make_pair(d, need_slack ? lp.x[2 * nc] : 0.0);
}

/// One accepted-or-rejected trust-region step with the beamformers fixed. On acceptance
/// the state moves and the radius grows; otherwise the radius halves and the LP is re-solved.
/// If every smoothed step is rejected, the same schedule is retried on the max model.
inline ScaStepResult sca_position_step(const std::vector<SlotScene>& scenes, ScaState& state,
                                       const BeamPlan& plan, const ScaConfig& cfg) {
  const ArrayGeometry g0 = state.geometry;
  require(plan.size() == scenes.size(), "plan and scene counts differ");
  const std::vector<CMat> Ws = covariances(plan);
  const VecX grad = position_gradient(scenes, g0, Ws, cfg.mu);
  const auto secrecy = linearize_secrecy_constraint(scenes, g0, Ws, cfg.mu, cfg.c_min);
  const auto spacing = linearize_spacing(g0);
  const double rmin = cfg.trust_min * cfg.wavelength, rmax = cfg.trust_max * cfg.wavelength;

  ScaStepResult out;
  out.objective = state.objective;
  ++state.iteration;
  if (grad.lpNorm<Eigen::Infinity>() == 0.0) {
    out.stalled = true;
    return out;
  }

  // Returns true when a step was accepted, false on rejection; sets stalled on LP failure.
  auto attempt_schedule = [&](const std::vector<MaxLinearSlot>* model, double radius) {
    for (int attempt = 0; attempt <= cfg.max_shrinks; ++attempt) {
      const auto sol = solve_position_lp(g0, grad, secrecy, spacing, radius, cfg.slack_penalty, model,
                                         scenes.size());
      ++out.lp_solves;
      if (!sol) {
        out.stalled = true;
        return false;
      }
      const VecX& d = sol->first;
      out.step_norm = d.lpNorm<Eigen::Infinity>();
      out.slack = sol->second;
      if (out.step_norm <= 1e-15) {
        out.stalled = true;
        return false;
      }
      ArrayGeometry cand = g0;
      cand.c = (g0.c + d).cwiseMax(0.0).cwiseMin(g0.region_side);
      const double viol = std::max(cand.box_violation(), cand.spacing_violation());
      const double obj = average_secrecy_rate(scenes, cand, plan).average;
      if (viol <= 1e-9 && obj >= state.objective) {
        out.accepted = true;
        out.objective = obj;
        out.max_violation = viol;
        state.geometry = std::move(cand);
        state.objective = obj;
        state.trust_radius = std::min(radius * cfg.grow, rmax);
        return true;
      }
      ++out.shrinks;
      radius = std::max(radius * 0.5, rmin);
      state.trust_radius = radius;
    }
    return false;
  };

  const double r0 = state.trust_radius;
  if (attempt_schedule(nullptr, r0) || out.stalled || !cfg.max_model_fallback) return out;
  const auto model = max_linear_model(scenes, g0, Ws);
  out.fallback = true;
  attempt_schedule(&model, r0);
  return out;
}

}  // namespace leosec
