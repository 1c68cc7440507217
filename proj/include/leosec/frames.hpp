#pragma once

// Coordinate frames: geocentric spherical (latitude, longitude, radius), geocentric
// Cartesian, and the ground-station-centric frame whose axes are local north, east
// and up.

#include "leosec/core.hpp"

namespace leosec {

struct GeoPosition {
  double latitude = 0.0;   // radians, [-pi/2, pi/2]
  double longitude = 0.0;  // radians, (-pi, pi]
  double radius = 0.0;     // meters

  /// Geocentric Cartesian coordinates.
  Vec3 cartesian() const {
    const double cl = std::cos(latitude);
    return {radius * cl * std::cos(longitude), radius * cl * std::sin(longitude),
            radius * std::sin(latitude)};
  }
};

/// Rotation taking station-centric coordinates to geocentric Cartesian ones.
/// Columns are local north, local east and local up.
struct FrameTransform {
  Mat3 matrix = Mat3::Identity();
  double epoch = 0.0;

  Vec3 to_global(const Vec3& local) const { return matrix * local; }
  Vec3 to_local(const Vec3& global) const { return matrix.transpose() * global; }
};

/// Geocentric longitude of the ground station at time t.
inline double gs_longitude(double t, double earth_rotation_period, double longitude0 = 0.0) {
  return longitude0 + kTwoPi * t / earth_rotation_period;
}

/// Ground-station position in the geocentric Cartesian frame at time t.
inline Vec3 gs_position(double gs_latitude, double t, double earth_radius,
                        double earth_rotation_period, double longitude0 = 0.0) {
  require_finite(gs_latitude, "gs_latitude");
  require_finite(t, "t");
  require_finite(earth_radius, "earth_radius");
  require_finite(longitude0, "longitude0");
  require(std::isfinite(earth_rotation_period) && earth_rotation_period > 0.0,
          "earth_rotation_period must be positive");
  require(earth_radius > 0.0, "earth_radius must be positive");
  const GeoPosition g{gs_latitude, gs_longitude(t, earth_rotation_period, longitude0),
                      earth_radius};
  return g.cartesian();
}

/// Station-centric to geocentric rotation at time t.
inline FrameTransform gs_frame(double gs_latitude, double t, double earth_rotation_period,
                               double longitude0 = 0.0) {
  require_finite(gs_latitude, "gs_latitude");
  require_finite(t, "t");
  require_finite(longitude0, "longitude0");
  require(std::isfinite(earth_rotation_period) && earth_rotation_period > 0.0,
          "earth_rotation_period must be positive");
  const double phi = gs_longitude(t, earth_rotation_period, longitude0);
  const double st = std::sin(gs_latitude), ct = std::cos(gs_latitude);
  const double sp = std::sin(phi), cp = std::cos(phi);
  FrameTransform f;
  f.epoch = t;
  f.matrix << -st * cp, -sp, ct * cp,
              -st * sp,  cp, ct * sp,
                    ct, 0.0,      st;
  return f;
}

struct WaveVector {
  Vec3 b_tilde;     // rad/m, station-centric frame
  double distance;  // meters
};

/// Wave vector toward `sat_pos` expressed in the station frame, plus the link range.
inline WaveVector wave_vector(const Vec3& sat_pos, const Vec3& gs_pos, double wavelength,
                              const FrameTransform& frame) {
  require(sat_pos.allFinite() && gs_pos.allFinite(), "positions must be finite");
  require(std::isfinite(wavelength) && wavelength > 0.0, "wavelength must be positive");
  const Vec3 d = sat_pos - gs_pos;
  const double dist = d.norm();
  if (!(dist > 0.0)) throw DegenerateGeometry("satellite and ground station coincide");
  const Vec3 b = (kTwoPi / (wavelength * dist)) * d;
  return {frame.to_local(b), dist};
}

}  // namespace leosec
