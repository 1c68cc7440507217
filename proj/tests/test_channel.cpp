#include "leosec/channel.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace leosec;
using namespace leosec::testing;

namespace {

ArrayGeometry grid_geometry(int n) {
  VecX c(2 * n);
  for (int i = 0; i < n; ++i) {
    c[2 * i] = 0.5 * kLambda * (i % 2);
    c[2 * i + 1] = 0.5 * kLambda * (i / 2);
  }
  return {c, 3 * kLambda, 0.5 * kLambda};
}

SlotScene scene_with_scales(double a_legit, std::vector<double> a_eaves) {
  std::mt19937_64 rng(7);
  SlotScene s = random_scene(rng, static_cast<int>(a_eaves.size()));
  s.serving.path_gain = a_legit * s.serving.noise_power;
  for (std::size_t m = 0; m < a_eaves.size(); ++m)
    s.eavesdroppers[m].path_gain = a_eaves[m] * s.eavesdroppers[m].noise_power;
  return s;
}

}  // namespace

TEST(SteeringVector, UnitModulusAndPhases) {
  std::mt19937_64 rng(1);
  const ArrayGeometry g = random_geometry(rng, 5);
  const Vec3 b(31.0, -12.0, 200.0);
  const CVec s = steering_vector(b, g);
  for (int n = 0; n < 5; ++n) {
    EXPECT_NEAR(std::abs(s[n]), 1.0, 1e-14);
    const double phase = 31.0 * g.c[2 * n] - 12.0 * g.c[2 * n + 1];
    EXPECT_NEAR(std::abs(s[n] - cdouble(std::cos(phase), std::sin(phase))), 0.0, 1e-12);
  }
}

TEST(SteeringVector, OverheadIsAllOnes) {
  std::mt19937_64 rng(2);
  const CVec s = steering_vector(Vec3(0, 0, kTwoPi / kLambda), random_geometry(rng, 4));
  EXPECT_LE((s - CVec::Ones(4)).norm(), 1e-14);
}

TEST(QuadraticForm, DoubleSumOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 6;
    const ArrayGeometry g = random_geometry(rng, n);
    const CMat W = random_psd(rng, n);
    const Link l = random_link(rng);
    cdouble sum = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double phase = l.b_tilde.x() * (g.c[2 * b] - g.c[2 * a]) + l.b_tilde.y() * (g.c[2 * b + 1] - g.c[2 * a + 1]);
        sum += W(a, b) * std::polar(1.0, phase);
      }
    EXPECT_NEAR(sum.imag(), 0.0, 1e-9 * W.norm());
    EXPECT_NEAR(received_power(W, l.b_tilde, g), sum.real(), 1e-9 * W.norm());
  }
}

TEST(ReceivedPower, RejectsNonHermitian) {
  CMat W = CMat::Identity(2, 2);
  W(0, 1) = 1.0;
  EXPECT_THROW(received_power(W, Vec3(1, 0, 0), grid_geometry(2)), InvalidInput);
  EXPECT_THROW(received_power(CMat::Identity(3, 3), Vec3(1, 0, 0), grid_geometry(2)), InvalidInput);
}

TEST(ChannelVector, MatchesSnrScale) {
  std::mt19937_64 rng(4);
  const ArrayGeometry g = random_geometry(rng, 4);
  const Link l = random_link(rng);
  const CVec w = random_cvec(rng, 4);
  const CVec h = channel_vector(l, g);
  EXPECT_NEAR(h.norm(), 2.0 * std::sqrt(l.path_gain), 1e-12 * h.norm());
  const double via_h = std::norm(w.dot(h)) / l.noise_power;
  const double via_s = l.snr_scale() * std::norm(w.dot(steering_vector(l.b_tilde, g)));
  EXPECT_NEAR(via_h, via_s, 1e-9 * via_s);
}

TEST(Snr, ScalesLinearly) {
  EXPECT_DOUBLE_EQ(snr(2.0, 4.0, 3.0), 1.5);
  EXPECT_THROW(snr(1.0, 0.0, 1.0), InvalidInput);
  EXPECT_DOUBLE_EQ(rate_from_snr(3.0), 2.0);
  EXPECT_DOUBLE_EQ(rate_from_snr(0.0), 0.0);
}

TEST(SecrecyRate, WorkedExamples) {
  // Single antenna, unit-power beamformer: SNR equals the scale a.
  const ArrayGeometry g = grid_geometry(1);
  const Beamformer bf{CVec::Ones(1)};
  {
    const SlotRates r = secrecy_rate(scene_with_scales(3.0, {1.0}), g, bf);
    EXPECT_NEAR(r.legit, 2.0, 1e-12);
    EXPECT_NEAR(r.eaves[0], 1.0, 1e-12);
    EXPECT_NEAR(r.secrecy, 1.0, 1e-12);
  }
  {
    const SlotRates r = secrecy_rate(scene_with_scales(1.0, {3.0, 7.0}), g, bf);
    EXPECT_NEAR(r.margin, 1.0 - 3.0, 1e-12);
    EXPECT_EQ(r.secrecy, 0.0);
    EXPECT_NEAR(r.max_eaves(), 3.0, 1e-12);
  }
  {
    const SlotRates r = secrecy_rate(scene_with_scales(15.0, {}), g, bf);
    EXPECT_NEAR(r.secrecy, 4.0, 1e-12);
    EXPECT_NEAR(r.margin, 4.0, 1e-12);
  }
}

TEST(SecrecyRate, CovarianceAndBeamformerAgree) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const ArrayGeometry g = random_geometry(rng, 4);
    const SlotScene sc = random_scene(rng, 3);
    const Beamformer bf{random_cvec(rng, 4)};
    const SlotRates a = secrecy_rate(sc, g, bf);
    const SlotRates b = secrecy_rate(sc, g, CMat(bf.w * bf.w.adjoint()));
    EXPECT_NEAR(a.legit, b.legit, 1e-10);
    EXPECT_NEAR(a.secrecy, b.secrecy, 1e-10);
    for (int m = 0; m < 3; ++m) EXPECT_NEAR(a.eaves[m], b.eaves[m], 1e-10);
  }
}

TEST(AverageSecrecyRate, MeanOverSlots) {
  const ArrayGeometry g = grid_geometry(1);
  const std::vector<SlotScene> scenes = {scene_with_scales(3.0, {1.0}), scene_with_scales(1.0, {3.0}),
                                         scene_with_scales(15.0, {})};
  const BeamPlan plan(3, Beamformer{CVec::Ones(1)});
  const SecrecyReport rep = average_secrecy_rate(scenes, g, plan);
  EXPECT_NEAR(rep.average, (1.0 + 0.0 + 4.0) / 3.0, 1e-12);
  EXPECT_EQ(rep.per_slot.size(), 3u);
  EXPECT_THROW(average_secrecy_rate(scenes, g, BeamPlan(2, Beamformer{CVec::Ones(1)})), InvalidInput);
}

TEST(Mrt, FullPowerAndCoherentGain) {
  std::mt19937_64 rng(6);
  const ArrayGeometry g = random_geometry(rng, 4);
  const Link l = random_link(rng);
  const Beamformer bf = mrt_beamformer(l, g, 10.0);
  EXPECT_NEAR(bf.power(), 10.0, 1e-12);
  EXPECT_NEAR(beam_gain(g, bf, l.b_tilde), 10.0 * 4, 1e-9);
}

TEST(ArrayGeometry, Violations) {
  VecX c(4);
  c << 0.0, 0.0, 0.01, 0.0;
  ArrayGeometry g(c, 0.05, 0.02);
  EXPECT_NEAR(g.spacing_violation(), 0.01, 1e-15);
  EXPECT_EQ(g.box_violation(), 0.0);
  EXPECT_FALSE(g.feasible());
  g.c[0] = -0.003;
  EXPECT_NEAR(g.box_violation(), 0.003, 1e-15);
  EXPECT_THROW(ArrayGeometry(VecX(3), 1.0, 0.1), InvalidInput);
}

TEST(BeamMap, ShapeAndPeak) {
  std::mt19937_64 rng(8);
  const ArrayGeometry g = random_geometry(rng, 4);
  Link l = random_link(rng);
  const Beamformer bf = mrt_beamformer(l, g, 1.0);
  const BeamMap map = beam_gain_map(g, bf, kLambda, 41);
  EXPECT_EQ(map.u.size(), 41u);
  EXPECT_TRUE(std::isnan(map.gain(0, 0)));
  EXPECT_NEAR(map.gain(20, 20), beam_gain(g, bf, Vec3(0, 0, 1)), 1e-12);
  double peak = 0.0;
  for (int i = 0; i < 41; ++i)
    for (int j = 0; j < 41; ++j)
      if (std::isfinite(map.gain(i, j))) peak = std::max(peak, map.gain(i, j));
  EXPECT_LE(peak, 4.0 + 1e-9);

  std::ostringstream os;
  write_beam_map_csv(os, map);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "direction_x,direction_y,gain");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  int finite = 0;
  for (int i = 0; i < 41; ++i)
    for (int j = 0; j < 41; ++j) finite += std::isfinite(map.gain(i, j));
  EXPECT_EQ(rows, finite);
}
