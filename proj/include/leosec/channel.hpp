#pragma once

// Array geometry, steering vectors, SNRs and secrecy rates.

#include "leosec/constellation.hpp"

#include <limits>
#include <ostream>
#include <vector>

namespace leosec {

/// Antenna positions c = [x1, y1, ..., xN, yN] in the station's horizontal plane, confined
/// to the square [0, L]^2 with pairwise spacing at least d_min.
struct ArrayGeometry {
  VecX c;
  double region_side = 0.0;  // L, meters
  double min_spacing = 0.0;  // d_min, meters

  ArrayGeometry() = default;
  ArrayGeometry(VecX flat, double side, double spacing)
      : c(std::move(flat)), region_side(side), min_spacing(spacing) {
    require(c.size() % 2 == 0 && c.size() > 0, "position vector must hold N >= 1 2-D points");
  }

  int size() const { return static_cast<int>(c.size() / 2); }
  Vec2 position(int n) const { return c.segment<2>(2 * n); }
  Vec2 centroid() const {
    Vec2 s = Vec2::Zero();
    for (int n = 0; n < size(); ++n) s += position(n);
    return s / size();
  }

  double min_pair_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (int n = 0; n < size(); ++n)
      for (int m = n + 1; m < size(); ++m) best = std::min(best, (position(n) - position(m)).norm());
    return best;
  }

  /// Largest excursion outside [0, L] over all coordinates (0 when inside).
  double box_violation() const {
    double v = 0.0;
    for (Eigen::Index k = 0; k < c.size(); ++k)
      v = std::max({v, -c[k], c[k] - region_side});
    return v;
  }

  /// Largest shortfall below d_min over all pairs (0 when spaced).
  double spacing_violation() const {
    return size() < 2 ? 0.0 : std::max(0.0, min_spacing - min_pair_distance());
  }

  bool feasible(double tol = 1e-9) const {
    return box_violation() <= tol && spacing_violation() <= tol;
  }

  double mean_distance_from_centroid() const {
    const Vec2 m = centroid();
    double s = 0.0;
    for (int n = 0; n < size(); ++n) s += (position(n) - m).norm();
    return s / size();
  }
};

struct Beamformer {
  CVec w;
  double power() const { return w.squaredNorm(); }
};

using BeamPlan = std::vector<Beamformer>;

/// Entry n is exp(j * b_tilde^T [c_n; 0]).
inline CVec steering_vector(const Vec3& b_tilde, const ArrayGeometry& geometry) {
  const int n = geometry.size();
  CVec s(n);
  for (int i = 0; i < n; ++i) {
    const double phase = b_tilde.x() * geometry.c[2 * i] + b_tilde.y() * geometry.c[2 * i + 1];
    s[i] = std::polar(1.0, phase);
  }
  return s;
}

/// Full channel including the range phase and path gain, sqrt(rho) e^{j|b||d|} s.
inline CVec channel_vector(const Link& link, const ArrayGeometry& geometry) {
  const double range_phase = link.b_tilde.norm() * link.distance;
  return std::sqrt(link.path_gain) * std::polar(1.0, range_phase) *
         steering_vector(link.b_tilde, geometry);
}

inline void check_hermitian(const CMat& W) {
  require(W.rows() == W.cols(), "matrix must be square");
  const double scale = std::max(1.0, W.norm());
  if ((W - W.adjoint()).norm() > 1e-10 * scale) throw InvalidInput("matrix is not Hermitian");
}

/// Quadratic form s^H W s of the Hermitian part of W.
inline double quadratic_form(const CMat& W, const CVec& s) {
  return std::max(0.0, (s.adjoint() * hermitian_part(W) * s)(0, 0).real());
}

inline double received_power(const CMat& W, const Vec3& b_tilde, const ArrayGeometry& geometry) {
  check_hermitian(W);
  require(W.rows() == geometry.size(), "W dimension must match the array size");
  const CVec s = steering_vector(b_tilde, geometry);
  return (s.adjoint() * hermitian_part(W) * s)(0, 0).real();
}

inline double snr(double path_gain, double noise_power, double u) {
  require(noise_power > 0.0, "noise power must be positive");
  return path_gain / noise_power * u;
}

inline double rate_from_snr(double gamma) { return std::log2(1.0 + gamma); }

struct SlotRates {
  double legit = 0.0;           // A_L
  std::vector<double> eaves;    // A_{E,m}
  double secrecy = 0.0;         // [A_L - max_m A_{E,m}]^+
  double margin = 0.0;          // A_L - max_m A_{E,m}, unclamped (A_L when M = 0)

  double max_eaves() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double a : eaves) m = std::max(m, a);
    return m;
  }
};

inline SlotRates finish_rates(double legit, std::vector<double> eaves) {
  SlotRates r;
  r.legit = legit;
  r.eaves = std::move(eaves);
  r.margin = r.eaves.empty() ? legit : legit - r.max_eaves();
  r.secrecy = std::max(0.0, r.margin);
  return r;
}

/// Rates for a (possibly relaxed) transmit covariance W.
inline SlotRates secrecy_rate(const SlotScene& scene, const ArrayGeometry& geometry, const CMat& W) {
  require(W.rows() == geometry.size() && W.cols() == geometry.size(),
          "W dimension must match the array size");
  auto rate = [&](const Link& l) {
    return rate_from_snr(l.snr_scale() * quadratic_form(W, steering_vector(l.b_tilde, geometry)));
  };
  std::vector<double> eaves;
  eaves.reserve(scene.eavesdroppers.size());
  for (const auto& e : scene.eavesdroppers) eaves.push_back(rate(e));
  return finish_rates(rate(scene.serving), std::move(eaves));
}

inline SlotRates secrecy_rate(const SlotScene& scene, const ArrayGeometry& geometry,
                              const Beamformer& bf) {
  require(bf.w.size() == geometry.size(), "beamformer length must match the array size");
  auto rate = [&](const Link& l) {
    const cdouble g = bf.w.dot(steering_vector(l.b_tilde, geometry));  // w^H s
    return rate_from_snr(l.snr_scale() * std::norm(g));
  };
  std::vector<double> eaves;
  eaves.reserve(scene.eavesdroppers.size());
  for (const auto& e : scene.eavesdroppers) eaves.push_back(rate(e));
  return finish_rates(rate(scene.serving), std::move(eaves));
}

struct SecrecyReport {
  std::vector<SlotRates> per_slot;
  double average = 0.0;
};

inline SecrecyReport average_secrecy_rate(const std::vector<SlotScene>& scenes,
                                          const ArrayGeometry& geometry, const BeamPlan& plan) {
  require(plan.size() == scenes.size(), "plan and scene counts differ");
  require(!scenes.empty(), "at least one slot is required");
  SecrecyReport rep;
  rep.per_slot.reserve(scenes.size());
  double sum = 0.0;
  for (std::size_t p = 0; p < scenes.size(); ++p) {
    rep.per_slot.push_back(secrecy_rate(scenes[p], geometry, plan[p]));
    sum += rep.per_slot.back().secrecy;
  }
  rep.average = sum / static_cast<double>(scenes.size());
  return rep;
}

/// Maximum-ratio transmission toward a link at full power.
inline Beamformer mrt_beamformer(const Link& link, const ArrayGeometry& geometry, double p_max) {
  const CVec s = steering_vector(link.b_tilde, geometry);
  return {std::sqrt(p_max / geometry.size()) * s};
}

inline BeamPlan mrt_plan(const std::vector<SlotScene>& scenes, const ArrayGeometry& geometry,
                         double p_max) {
  BeamPlan plan;
  plan.reserve(scenes.size());
  for (const auto& s : scenes) plan.push_back(mrt_beamformer(s.serving, geometry, p_max));
  return plan;
}

/// Gain |w^H s|^2 over a square grid of direction cosines (u, v) in [-1, 1]^2.
/// Cells with u^2 + v^2 > 1 (no physical direction) hold NaN.
struct BeamMap {
  std::vector<double> u;
  std::vector<double> v;
  MatX gain;  // gain(i, j) at (u[i], v[j])
};

inline BeamMap beam_gain_map(const ArrayGeometry& geometry, const Beamformer& bf, double wavelength,
                             int resolution) {
  require(resolution >= 2, "beam map resolution must be >= 2");
  require(bf.w.size() == geometry.size(), "beamformer length must match the array size");
  BeamMap map;
  map.u.resize(resolution);
  for (int i = 0; i < resolution; ++i) map.u[i] = -1.0 + 2.0 * i / (resolution - 1);
  map.v = map.u;
  map.gain.setConstant(resolution, resolution, std::numeric_limits<double>::quiet_NaN());
  const double k = kTwoPi / wavelength;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      if (map.u[i] * map.u[i] + map.v[j] * map.v[j] > 1.0 + 1e-12) continue;
      const Vec3 b(k * map.u[i], k * map.v[j], 0.0);
      map.gain(i, j) = std::norm(bf.w.dot(steering_vector(b, geometry)));
    }
  }
  return map;
}

/// Gain at one horizontal wave vector.
inline double beam_gain(const ArrayGeometry& geometry, const Beamformer& bf, const Vec3& b_tilde) {
  return std::norm(bf.w.dot(steering_vector(b_tilde, geometry)));
}

/// CSV with header direction_x,direction_y,gain; NaN cells are skipped.
inline void write_beam_map_csv(std::ostream& os, const BeamMap& map) {
  os << "direction_x,direction_y,gain\n";
  os.precision(10);
  for (std::size_t i = 0; i < map.u.size(); ++i)
    for (std::size_t j = 0; j < map.v.size(); ++j)
      if (std::isfinite(map.gain(i, j))) os << map.u[i] << ',' << map.v[j] << ',' << map.gain(i, j) << '\n';
}

}  // namespace leosec
