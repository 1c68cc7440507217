#pragma once

// Walker Delta kinematics, slot grid, visibility and per-slot scene assembly.

#include "leosec/frames.hpp"

#include <algorithm>
#include <compare>
#include <optional>
#include <vector>

namespace leosec {

struct ConstellationSpec {
  int num_planes = 6;                        // J
  int sats_per_plane = 8;                    // K
  double altitude = 550e3;                   // m
  double inclination = deg2rad(50.0);        // rad
  double earth_radius = 6371e3;              // m
  double gravitational_parameter = 3.986004418e14;  // m^3/s^2
  double earth_rotation_period = 86164.0905;         // s, sidereal day
  bool ascending_only = false;  // keep only satellites with orbit angle in [-pi/2, pi/2]

  void validate() const {
    require(num_planes >= 1, "num_planes must be >= 1");
    require(sats_per_plane >= 2, "sats_per_plane must be >= 2");
    require(std::isfinite(altitude) && altitude > 0.0, "altitude must be positive");
    require(std::isfinite(inclination) && inclination > 0.0 && inclination < kPi,
            "inclination must lie in (0, pi)");
    require(std::isfinite(earth_radius) && earth_radius > 0.0, "earth_radius must be positive");
    require(std::isfinite(gravitational_parameter) && gravitational_parameter > 0.0,
            "gravitational_parameter must be positive");
    require(std::isfinite(earth_rotation_period) && earth_rotation_period > 0.0,
            "earth_rotation_period must be positive");
  }

  double orbital_radius() const { return earth_radius + altitude; }
};

struct SatelliteId {
  int plane = 1;  // 1..J
  int index = 1;  // 1..K
  auto operator<=>(const SatelliteId&) const = default;
};

inline void check_id(const ConstellationSpec& spec, const SatelliteId& id) {
  require(id.plane >= 1 && id.plane <= spec.num_planes, "satellite plane out of range");
  require(id.index >= 1 && id.index <= spec.sats_per_plane, "satellite index out of range");
}

/// Circular-orbit period 2*pi*sqrt(Rbar^3 / GM).
inline double orbital_period(const ConstellationSpec& spec) {
  require(spec.gravitational_parameter > 0.0, "gravitational_parameter must be positive");
  const double r = spec.orbital_radius();
  return kTwoPi * std::sqrt(r * r * r / spec.gravitational_parameter);
}

/// Angle from the ascending node at time t.
inline double orbit_angle(const ConstellationSpec& spec, const SatelliteId& id, double t) {
  const double initial =
      -kPi / 2.0 + kPi * static_cast<double>(id.index - 1) / static_cast<double>(spec.sats_per_plane - 1);
  return kTwoPi * t / orbital_period(spec) + initial;
}

inline GeoPosition satellite_geodetic(const ConstellationSpec& spec, const SatelliteId& id,
                                      double t) {
  check_id(spec, id);
  const double alpha = orbit_angle(spec, id, t);
  const double sb = std::sin(spec.inclination), cb = std::cos(spec.inclination);
  GeoPosition g;
  g.latitude = std::asin(std::clamp(sb * std::sin(alpha), -1.0, 1.0));
  // Two-argument form of atan(cos(beta) * tan(alpha)) keeps the quadrant of alpha.
  g.longitude = wrap_angle(std::atan2(cb * std::sin(alpha), std::cos(alpha)) +
                           kTwoPi * id.plane / spec.num_planes);
  g.radius = spec.orbital_radius();
  return g;
}

inline Vec3 satellite_position(const ConstellationSpec& spec, const SatelliteId& id, double t) {
  return satellite_geodetic(spec, id, t).cartesian();
}

/// True when the satellite lies on the ascending (south-to-north) half of its orbit.
inline bool on_ascending_segment(const ConstellationSpec& spec, const SatelliteId& id, double t) {
  return std::cos(orbit_angle(spec, id, t)) >= 0.0;
}

struct TimeGrid {
  double raw_interval = 0.0;  // T_E / J
  double interval = 0.0;      // snapped to an integer multiple of T/K
  int period_multiple = 0;    // interval / (T/K)
  int num_slots = 0;
  std::vector<double> midpoints;
};

inline TimeGrid build_time_grid(const ConstellationSpec& spec, int num_slots) {
  spec.validate();
  require(num_slots >= 1, "num_slots must be >= 1");
  TimeGrid g;
  g.raw_interval = spec.earth_rotation_period / spec.num_planes;
  const double unit = orbital_period(spec) / spec.sats_per_plane;
  g.period_multiple = std::max(1, static_cast<int>(std::lround(g.raw_interval / unit)));
  g.interval = g.period_multiple * unit;
  g.num_slots = num_slots;
  g.midpoints.resize(num_slots);
  for (int p = 1; p <= num_slots; ++p) g.midpoints[p - 1] = (p - 0.5) * g.interval / num_slots;
  return g;
}

/// Elevation of `sat_pos` above the local horizon of a station at `gs_pos` (spherical Earth).
inline double elevation_angle(const Vec3& sat_pos, const Vec3& gs_pos) {
  const Vec3 d = sat_pos - gs_pos;
  const double dn = d.norm(), gn = gs_pos.norm();
  if (!(dn > 0.0)) throw DegenerateGeometry("satellite and ground station coincide");
  require(gn > 0.0, "ground station must not sit at the Earth's center");
  return std::asin(std::clamp(d.dot(gs_pos) / (dn * gn), -1.0, 1.0));
}

struct GroundStation {
  double latitude = deg2rad(40.0);  // rad
  double longitude0 = 0.0;          // rad, longitude at t = 0
};

enum class ServingPolicy { MaxElevation, MinRange };

struct LinkBudget {
  double wavelength = kSpeedOfLight / 12e9;  // m
  double path_loss_exponent = 2.0;
  std::optional<double> reference_gain;      // rho0 at 1 m; free space when empty
  double noise_serving = dbm_to_watts(-148.0);  // W
  double noise_eaves = dbm_to_watts(-148.0);    // W
  double min_elevation = deg2rad(10.0);         // rad
  ServingPolicy policy = ServingPolicy::MaxElevation;

  double rho0() const {
    if (reference_gain) return *reference_gain;
    const double f = wavelength / (4.0 * kPi);
    return f * f;
  }
};

struct Link {
  SatelliteId id;
  Vec3 b_tilde;          // rad/m, station frame
  double distance = 0;   // m
  double elevation = 0;  // rad
  double path_gain = 0;  // rho
  double noise_power = 0;  // W

  /// rho / sigma^2.
  double snr_scale() const { return path_gain / noise_power; }
  /// Horizontal wave-vector components; the only part an in-plane array sees.
  Vec2 horizontal() const { return b_tilde.head<2>(); }
};

struct SlotScene {
  int slot_index = 1;  // 1-based
  double time = 0.0;
  Link serving;
  std::vector<Link> eavesdroppers;

  std::size_t num_eavesdroppers() const { return eavesdroppers.size(); }
};

struct VisibleSatellite {
  SatelliteId id;
  Vec3 position;
  double elevation;
};

/// Every satellite at or above the mask at time t, in (plane, index) order.
inline std::vector<VisibleSatellite> visible_satellites(const ConstellationSpec& spec,
                                                        const GroundStation& gs, double t,
                                                        double min_elevation) {
  const Vec3 g = gs_position(gs.latitude, t, spec.earth_radius, spec.earth_rotation_period,
                             gs.longitude0);
  std::vector<VisibleSatellite> out;
  for (int j = 1; j <= spec.num_planes; ++j) {
    for (int k = 1; k <= spec.sats_per_plane; ++k) {
      const SatelliteId id{j, k};
      if (spec.ascending_only && !on_ascending_segment(spec, id, t)) continue;
      const Vec3 s = satellite_position(spec, id, t);
      const double el = elevation_angle(s, g);
      if (el >= min_elevation) out.push_back({id, s, el});
    }
  }
  return out;
}

/// Scene for slot p (1-based): serving satellite per policy, every other visible satellite
/// an eavesdropper.
inline SlotScene build_slot_scene(const ConstellationSpec& spec, const TimeGrid& grid, int p,
                                  const GroundStation& gs, const LinkBudget& budget) {
  require(p >= 1 && p <= grid.num_slots, "slot index out of range");
  require(budget.wavelength > 0.0, "wavelength must be positive");
  require(budget.noise_serving > 0.0 && budget.noise_eaves > 0.0, "noise powers must be positive");
  require(budget.rho0() > 0.0, "reference gain must be positive");
  const double t = grid.midpoints[p - 1];
  auto vis = visible_satellites(spec, gs, t, budget.min_elevation);
  if (vis.empty()) throw EmptyVisibility("no satellite above the mask in slot " + std::to_string(p));

  const Vec3 g = gs_position(gs.latitude, t, spec.earth_radius, spec.earth_rotation_period,
                             gs.longitude0);
  const FrameTransform frame = gs_frame(gs.latitude, t, spec.earth_rotation_period, gs.longitude0);

  // vis is in lexicographic id order, so strict comparison keeps the smaller id on ties.
  std::size_t best = 0;
  for (std::size_t i = 1; i < vis.size(); ++i) {
    const bool better = budget.policy == ServingPolicy::MaxElevation
                            ? vis[i].elevation > vis[best].elevation
                            : (vis[i].position - g).norm() < (vis[best].position - g).norm();
    if (better) best = i;
  }

  auto make_link = [&](const VisibleSatellite& v, double noise) {
    const WaveVector wv = wave_vector(v.position, g, budget.wavelength, frame);
    Link l;
    l.id = v.id;
    l.b_tilde = wv.b_tilde;
    l.distance = wv.distance;
    l.elevation = v.elevation;
    l.path_gain = budget.rho0() * std::pow(wv.distance, -budget.path_loss_exponent);
    l.noise_power = noise;
    return l;
  };

  SlotScene scene;
  scene.slot_index = p;
  scene.time = t;
  scene.serving = make_link(vis[best], budget.noise_serving);
  for (std::size_t i = 0; i < vis.size(); ++i)
    if (i != best) scene.eavesdroppers.push_back(make_link(vis[i], budget.noise_eaves));
  return scene;
}

struct SceneSet {
  TimeGrid grid;
  std::vector<SlotScene> scenes;  // slots with at least one visible satellite
  std::vector<int> empty_slots;   // 1-based indices of slots without service
};

/// Builds every slot's scene; slots where nothing clears the mask are listed, not fatal.
inline SceneSet build_scenes(const ConstellationSpec& spec, int num_slots, const GroundStation& gs,
                             const LinkBudget& budget) {
  SceneSet set;
  set.grid = build_time_grid(spec, num_slots);
  for (int p = 1; p <= num_slots; ++p) {
    try {
      set.scenes.push_back(build_slot_scene(spec, set.grid, p, gs, budget));
    } catch (const EmptyVisibility&) {
      set.empty_slots.push_back(p);
    }
  }
  return set;
}

}  // namespace leosec
