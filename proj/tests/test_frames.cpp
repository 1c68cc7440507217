#include "leosec/frames.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace leosec;

namespace {

constexpr double kR = 6371e3;
constexpr double kTE = 86164.0905;

void expect_vec_near(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_NEAR((a - b).norm(), 0.0, tol) << a.transpose() << " vs " << b.transpose();
}

}  // namespace

TEST(GsPosition, EquatorAtEpoch) { expect_vec_near(gs_position(0.0, 0.0, kR, kTE), Vec3(kR, 0, 0), 1e-6); }

TEST(GsPosition, PoleIsRotationInvariant) {
  for (double t : {0.0, 1234.5, 40000.0}) expect_vec_near(gs_position(kPi / 2, t, kR, kTE), Vec3(0, 0, kR), 1e-6);
}

TEST(GsPosition, QuarterRotation) { expect_vec_near(gs_position(0.0, kTE / 4, kR, kTE), Vec3(0, kR, 0), 1e-6); }

TEST(GsPosition, NormAndPeriodicity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lat(-kPi / 2, kPi / 2), t(0.0, 2 * kTE);
  for (int i = 0; i < 200; ++i) {
    const double la = lat(rng), tt = t(rng);
    const Vec3 a = gs_position(la, tt, kR, kTE), b = gs_position(la, tt + kTE, kR, kTE);
    EXPECT_NEAR(a.norm(), kR, 1e-9 * kR);
    EXPECT_LE((a - b).norm(), 1e-9 * kR);
  }
}

TEST(GsPosition, RejectsBadInput) {
  EXPECT_THROW(gs_position(0.0, 0.0, kR, 0.0), InvalidInput);
  EXPECT_THROW(gs_position(std::nan(""), 0.0, kR, kTE), InvalidInput);
  EXPECT_THROW(gs_position(0.0, std::numeric_limits<double>::infinity(), kR, kTE), InvalidInput);
}

TEST(GsFrame, IdentityCaseRows) {
  Mat3 expected;
  expected << 0, 0, 1, 0, 1, 0, 1, 0, 0;
  EXPECT_LE((gs_frame(0.0, 0.0, kTE).matrix - expected).norm(), 1e-15);
}

TEST(GsFrame, OrthonormalNeuColumns) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(-kPi / 2, kPi / 2), t(-1e5, 1e5);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 T = gs_frame(lat(rng), t(rng), kTE).matrix;
    EXPECT_LE((T.transpose() * T - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(T.determinant(), -1.0, 1e-12);  // north x east points down
  }
}

TEST(GsFrame, MatchesDirectEvaluation) {
  const double th = 0.3, t = 1000.0, te = 86164.0;
  const double ph = 2 * M_PI * t / te;
  const double e[3][3] = {{-std::sin(th) * std::cos(ph), -std::sin(ph), std::cos(th) * std::cos(ph)},
                          {-std::sin(th) * std::sin(ph), std::cos(ph), std::cos(th) * std::sin(ph)},
                          {std::cos(th), 0.0, std::sin(th)}};
  const Mat3 T = gs_frame(th, t, te).matrix;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(T(i, j), e[i][j], 1e-15);
}

TEST(GsFrame, ColumnsAreNorthEastUp) {
  const double lat = 0.7, t = 5000.0;
  const FrameTransform f = gs_frame(lat, t, kTE);
  const Vec3 g = gs_position(lat, t, kR, kTE);
  expect_vec_near(f.matrix.col(2), g.normalized(), 1e-14);
  EXPECT_GT(f.matrix.col(0).z(), 0.0);  // north has a positive polar component
  EXPECT_NEAR(f.matrix.col(1).z(), 0.0, 1e-15);
}

TEST(WaveVector, OverheadSatellite) {
  const double lam = kSpeedOfLight / 12e9;
  const double lat = 0.4, t = 321.0;
  const Vec3 g = gs_position(lat, t, kR, kTE);
  const Vec3 s = g.normalized() * (kR + 550e3);
  const WaveVector wv = wave_vector(s, g, lam, gs_frame(lat, t, kTE));
  expect_vec_near(wv.b_tilde, Vec3(0, 0, kTwoPi / lam), 1e-9);
  EXPECT_NEAR(wv.distance, 550e3, 1e-6);
}

TEST(WaveVector, MagnitudeIsWavenumber) {
  const double lam = kSpeedOfLight / 12e9;
  EXPECT_NEAR(kTwoPi / lam, 251.5, 0.05);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1e6);
  for (int i = 0; i < 200; ++i) {
    const Vec3 g = gs_position(0.2, i * 10.0, kR, kTE);
    const Vec3 s(n(rng) + 7e6, n(rng), n(rng));
    const WaveVector wv = wave_vector(s, g, lam, gs_frame(0.2, i * 10.0, kTE));
    EXPECT_NEAR(wv.b_tilde.norm(), kTwoPi / lam, 1e-9 * kTwoPi / lam);
    EXPECT_NEAR(wv.distance, (s - g).norm(), 1e-6);
    // Up component is positive exactly when the satellite is above the horizon.
    EXPECT_EQ(wv.b_tilde.z() > 0, (s - g).dot(g) > 0);
  }
}

TEST(WaveVector, CoincidentPositionsThrow) {
  const Vec3 g(kR, 0, 0);
  EXPECT_THROW(wave_vector(g, g, 0.025, gs_frame(0, 0, kTE)), DegenerateGeometry);
  EXPECT_THROW(wave_vector(g * 2, g, 0.0, gs_frame(0, 0, kTE)), InvalidInput);
}

TEST(GeoPosition, CartesianRoundTrip) {
  const GeoPosition p{0.3, -2.0, 7e6};
  const Vec3 c = p.cartesian();
  EXPECT_NEAR(c.norm(), 7e6, 1e-6);
  EXPECT_NEAR(std::asin(c.z() / c.norm()), 0.3, 1e-14);
  EXPECT_NEAR(std::atan2(c.y(), c.x()), -2.0, 1e-14);
}
