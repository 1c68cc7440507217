#include "leosec/constellation.hpp"

#include <gtest/gtest.h>

using namespace leosec;

namespace {

double closed_form_period(double radius, double gm) { return 2.0 * M_PI * std::sqrt(std::pow(radius, 3) / gm); }

TimeGrid single_slot_at(double t) {
  TimeGrid g;
  g.num_slots = 1;
  g.midpoints = {t};
  g.interval = 2 * t;
  return g;
}

}  // namespace

TEST(OrbitalPeriod, DeskAltitude) {
  ConstellationSpec s;
  const double T = orbital_period(s);
  EXPECT_NEAR(T, closed_form_period(6371e3 + 550e3, 3.986004418e14), 1e-9);
  EXPECT_NEAR(T, 5730.3, 1.0);
}

TEST(OrbitalPeriod, ScalesWithGm) {
  ConstellationSpec s;
  const double T = orbital_period(s);
  s.gravitational_parameter *= 4;
  EXPECT_NEAR(orbital_period(s), T / 2, 1e-9);
}

TEST(OrbitalPeriod, SeaLevel) {
  ConstellationSpec s;
  s.altitude = 1e-9;
  EXPECT_NEAR(orbital_period(s), closed_form_period(6371e3, 3.986004418e14), 1e-6);
  EXPECT_NEAR(orbital_period(s), 5060.8, 0.1);
}

TEST(SatelliteGeodetic, InitialAngle) {
  ConstellationSpec s;
  EXPECT_NEAR(orbit_angle(s, {1, 1}, 0.0), -M_PI / 2, 1e-15);
  EXPECT_NEAR(orbit_angle(s, {1, s.sats_per_plane}, 0.0), M_PI / 2, 1e-15);
}

TEST(SatelliteGeodetic, AscendingNode) {
  ConstellationSpec s;
  const double T = orbital_period(s);
  for (int j = 1; j <= s.num_planes; ++j) {
    const GeoPosition g = satellite_geodetic(s, {j, 1}, T / 4);  // alpha = 0
    EXPECT_NEAR(g.latitude, 0.0, 1e-12);
    EXPECT_NEAR(std::remainder(g.longitude - 2 * M_PI * j / s.num_planes, 2 * M_PI), 0.0, 1e-12);
    EXPECT_GT(g.longitude, -M_PI);
    EXPECT_LE(g.longitude, M_PI);
  }
}

TEST(SatelliteGeodetic, Apex) {
  ConstellationSpec s;
  const double T = orbital_period(s);
  const GeoPosition g = satellite_geodetic(s, {2, 1}, T / 2);  // alpha = pi/2
  EXPECT_NEAR(g.latitude, s.inclination, 1e-12);
  EXPECT_NEAR(std::remainder(g.longitude - (M_PI / 2 + 2 * M_PI * 2 / 6), 2 * M_PI), 0.0, 1e-12);
}

TEST(SatelliteGeodetic, LongitudeIsContinuousAlongOrbit) {
  ConstellationSpec s;
  const double T = orbital_period(s);
  double prev = satellite_geodetic(s, {1, 3}, 0.0).longitude;
  for (int i = 1; i <= 2000; ++i) {
    const double lon = satellite_geodetic(s, {1, 3}, T * i / 2000.0).longitude;
    EXPECT_LT(std::abs(std::remainder(lon - prev, 2 * M_PI)), 0.05);
    prev = lon;
  }
}

TEST(SatellitePosition, OnSphereAndPeriodic) {
  ConstellationSpec s;
  const double T = orbital_period(s), Rb = s.orbital_radius();
  for (int j = 1; j <= s.num_planes; ++j)
    for (int k = 1; k <= s.sats_per_plane; ++k)
      for (double t : {0.0, 100.0, 3333.3, 1e5}) {
        const Vec3 p = satellite_position(s, {j, k}, t);
        EXPECT_NEAR(p.norm(), Rb, 1e-9 * Rb);
        EXPECT_LE((p - satellite_position(s, {j, k}, t + T)).norm(), 1e-6);
      }
}

TEST(SatellitePosition, ZeroAnglesOnXAxis) {
  ConstellationSpec s;
  s.num_planes = 1;  // plane offset 2*pi*1/1
  const Vec3 p = satellite_position(s, {1, 1}, orbital_period(s) / 4);
  EXPECT_LE((p - Vec3(s.orbital_radius(), 0, 0)).norm(), 1e-6);
}

TEST(SatellitePosition, RejectsBadId) {
  ConstellationSpec s;
  EXPECT_THROW(satellite_position(s, {0, 1}, 0.0), InvalidInput);
  EXPECT_THROW(satellite_position(s, {1, 9}, 0.0), InvalidInput);
}

TEST(TimeGrid, Midpoints) {
  ConstellationSpec s;
  const TimeGrid g1 = build_time_grid(s, 1);
  EXPECT_DOUBLE_EQ(g1.midpoints[0], g1.interval / 2);
  const TimeGrid g4 = build_time_grid(s, 4);
  const double f[] = {1.0 / 8, 3.0 / 8, 5.0 / 8, 7.0 / 8};
  for (int p = 0; p < 4; ++p) EXPECT_NEAR(g4.midpoints[p], f[p] * g4.interval, 1e-9);
  EXPECT_THROW(build_time_grid(s, 0), InvalidInput);
}

TEST(TimeGrid, SnapsToPeriodMultiple) {
  ConstellationSpec s;
  const TimeGrid g = build_time_grid(s, 8);
  const double unit = orbital_period(s) / 8;
  EXPECT_NEAR(g.raw_interval, 14360.7, 0.1);
  EXPECT_EQ(g.period_multiple, 20);
  EXPECT_NEAR(g.interval, 20 * unit, 1e-9);
  EXPECT_NEAR(g.interval, 14325.8, 1.0);
}

TEST(Elevation, SpecialDirections) {
  const Vec3 g(6371e3, 0, 0);
  EXPECT_NEAR(elevation_angle(g + Vec3(5e5, 0, 0), g), M_PI / 2, 1e-12);
  EXPECT_NEAR(elevation_angle(g + Vec3(0, 5e5, 0), g), 0.0, 1e-12);
  EXPECT_NEAR(elevation_angle(g - Vec3(5e5, 0, 0), g), -M_PI / 2, 1e-12);
  EXPECT_THROW(elevation_angle(g, g), DegenerateGeometry);
}

TEST(LinkBudget, FriisConsistency) {
  ConstellationSpec s;
  LinkBudget b;
  GroundStation gs;
  const SceneSet set = build_scenes(s, 8, gs, b);
  ASSERT_FALSE(set.scenes.empty());
  for (const auto& sc : set.scenes) {
    auto check = [&](const Link& l) {
      EXPECT_NEAR(l.path_gain * std::pow(4 * M_PI * l.distance / b.wavelength, 2), 1.0, 1e-12);
      EXPECT_GT(l.noise_power, 0.0);
    };
    check(sc.serving);
    for (const auto& e : sc.eavesdroppers) check(e);
  }
}

TEST(LinkBudget, NoiseFromDbm) { EXPECT_NEAR(LinkBudget{}.noise_serving, 1.585e-18, 1e-21); }

TEST(SlotScene, MatchesBruteForceScan) {
  ConstellationSpec s;
  LinkBudget b;
  GroundStation gs;
  const TimeGrid grid = build_time_grid(s, 8);
  int nonempty = 0;
  for (int p = 1; p <= 8; ++p) {
    const double t = grid.midpoints[p - 1];
    const Vec3 g = gs_position(gs.latitude, t, s.earth_radius, s.earth_rotation_period);
    const FrameTransform f = gs_frame(gs.latitude, t, s.earth_rotation_period);
    // Oracle: elevation from the up component of the station-frame direction.
    std::vector<std::pair<double, SatelliteId>> vis;
    for (int j = 1; j <= s.num_planes; ++j)
      for (int k = 1; k <= s.sats_per_plane; ++k) {
        const Vec3 d = f.to_local(satellite_position(s, {j, k}, t) - g);
        const double el = std::asin(d.z() / d.norm());
        if (el >= b.min_elevation) vis.push_back({el, {j, k}});
      }
    if (vis.empty()) {
      EXPECT_THROW(build_slot_scene(s, grid, p, gs, b), EmptyVisibility);
      continue;
    }
    ++nonempty;
    const SlotScene sc = build_slot_scene(s, grid, p, gs, b);
    auto best = std::max_element(vis.begin(), vis.end(), [](auto& a, auto& c) { return a.first < c.first; });
    EXPECT_EQ(sc.serving.id, best->second);
    EXPECT_EQ(sc.eavesdroppers.size() + 1, vis.size());
    for (const auto& e : sc.eavesdroppers) {
      EXPECT_NE(e.id, sc.serving.id);
      EXPECT_GE(e.elevation, b.min_elevation);
      EXPECT_LE(e.elevation, sc.serving.elevation);
    }
  }
  EXPECT_GT(nonempty, 0);
}

TEST(SlotScene, SingleAndPairVisibility) {
  ConstellationSpec s;
  LinkBudget b;
  GroundStation gs;
  bool saw_one = false, saw_two = false;
  for (double t = 0; t < 86164 && !(saw_one && saw_two); t += 60) {
    const auto vis = visible_satellites(s, gs, t, b.min_elevation);
    if (vis.size() == 1 && !saw_one) {
      const SlotScene sc = build_slot_scene(s, single_slot_at(t), 1, gs, b);
      EXPECT_EQ(sc.serving.id, vis[0].id);
      EXPECT_TRUE(sc.eavesdroppers.empty());
      saw_one = true;
    }
    if (vis.size() == 2 && !saw_two) {
      const SlotScene sc = build_slot_scene(s, single_slot_at(t), 1, gs, b);
      const auto& hi = vis[0].elevation >= vis[1].elevation ? vis[0] : vis[1];
      const auto& lo = vis[0].elevation >= vis[1].elevation ? vis[1] : vis[0];
      EXPECT_EQ(sc.serving.id, hi.id);
      ASSERT_EQ(sc.eavesdroppers.size(), 1u);
      EXPECT_EQ(sc.eavesdroppers[0].id, lo.id);
      saw_two = true;
    }
  }
  EXPECT_TRUE(saw_one);
  EXPECT_TRUE(saw_two);
}

TEST(SlotScene, PathGainDecreasesWithDistance) {
  ConstellationSpec s;
  LinkBudget b;
  GroundStation gs;
  for (const auto& sc : build_scenes(s, 8, gs, b).scenes) {
    std::vector<Link> links = sc.eavesdroppers;
    links.push_back(sc.serving);
    for (const auto& a : links)
      for (const auto& c : links) {
        if (a.distance < c.distance) {
          EXPECT_GT(a.path_gain, c.path_gain);
        }
      }
  }
}

TEST(SlotScene, EmptyVisibilityIsReported) {
  ConstellationSpec s;
  LinkBudget b;
  b.min_elevation = deg2rad(89.99);
  GroundStation gs;
  const SceneSet set = build_scenes(s, 4, gs, b);
  EXPECT_TRUE(set.scenes.empty());
  EXPECT_EQ(set.empty_slots.size(), 4u);
  EXPECT_THROW(build_slot_scene(s, set.grid, 1, gs, b), EmptyVisibility);
}

TEST(SlotScene, AscendingOnlyFilter) {
  ConstellationSpec s;
  s.ascending_only = true;
  GroundStation gs;
  for (double t = 0; t < 20000; t += 500)
    for (const auto& v : visible_satellites(s, gs, t, 0.0))
      EXPECT_GE(std::cos(orbit_angle(s, v.id, t)), 0.0);
}

TEST(ConstellationSpec, Validation) {
  ConstellationSpec s;
  s.sats_per_plane = 1;
  EXPECT_THROW(s.validate(), InvalidInput);
  s = {};
  s.inclination = 0.0;
  EXPECT_THROW(s.validate(), InvalidInput);
  s = {};
  s.altitude = -1;
  EXPECT_THROW(s.validate(), InvalidInput);
}
