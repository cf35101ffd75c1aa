#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_support.hpp"

using namespace billiards;
using namespace billiards::testing;

TEST(MeanFreePath, Predictions) {
  EXPECT_NEAR(mean_free_path_prediction(2, M_PI, 2.0 * M_PI), M_PI / 2.0, 1e-15);
  EXPECT_NEAR(mean_free_path_prediction(3, 4.0 * M_PI / 3.0, 4.0 * M_PI), 4.0 / 3.0, 1e-15);
}

TEST(MeanFreePath, DiskSpaceAverage) {
  const MeanFreePath m = mean_free_path(make_preset("disk"), 50000, 1, 1);
  EXPECT_NEAR(m.prediction, M_PI / 2.0, 1e-12);
  EXPECT_LT(std::fabs(m.z_score), 4.0);
  EXPECT_EQ(m.space.trapped, 0u);
}

TEST(MeanFreePath, IndependentOfWorkers) {
  const Table t = make_preset("torus-two-balls");
  const SpaceAverage a = space_average(t, Observable::chord_length(), 30000, 3, 1);
  const SpaceAverage b = space_average(t, Observable::chord_length(), 30000, 3, 8);
  EXPECT_TRUE(a.estimate == b.estimate);
  EXPECT_EQ(a.estimate.mean(), b.estimate.mean());
}

TEST(MeanFreePath, TooManyTrapped) {
  const Table t = make_preset("torus-one-ball").with_l_max(2.0);
  try {
    space_average(t, Observable::chord_length(), 5000, 1, 1);
    FAIL() << "expected too_many_trapped";
  } catch (const BilliardError& e) {
    EXPECT_EQ(e.code(), BilliardError::Code::too_many_trapped);
  }
}

TEST(HearVolume, RecoversDiskArea) {
  const std::vector<double> constant(100, M_PI / 2.0);
  const auto v = hear_volume(constant, 2.0 * M_PI, 2);
  EXPECT_NEAR(v.back(), M_PI, 1e-12);
  // Orbit data from the disk.
  const Table disk = make_preset("disk");
  const BoundarySampler sampler(disk);
  std::vector<double> lengths;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const auto c = causality_map(disk, draw_boundary(sampler, 1, i));
    lengths.push_back(c->length);
  }
  EXPECT_NEAR(hear_volume(lengths, 2.0 * M_PI, 2).back(), M_PI, 0.02 * M_PI);
}

TEST(HearVolume, ShuffleInvariant) {
  CounterRng rng(2, 0, 0);
  std::vector<double> xs(5000);
  for (auto& x : xs) x = rng.uniform(0.0, 3.0);
  const double a = hear_volume(xs, 1.7, 3).back();
  std::mt19937_64 gen(3);
  std::shuffle(xs.begin(), xs.end(), gen);
  EXPECT_EQ(hear_volume(xs, 1.7, 3).back(), a);
}

TEST(HearVolume, Errors) {
  try {
    hear_volume({}, 1.0, 2);
    FAIL();
  } catch (const BilliardError& e) {
    EXPECT_EQ(e.code(), BilliardError::Code::empty_sequence);
  }
  EXPECT_THROW(hear_volume({1.0}, 0.0, 2), BilliardError);
}

TEST(Birkhoff, TimeAverageRunningMeans) {
  const Table t = make_preset("torus-two-balls");
  const BoundarySampler sampler(t);
  const TimeAverage ta = time_average(t, ReflectionLaw::elastic(), Observable::chord_length(),
                                      draw_boundary(sampler, 4, 0), 1000);
  EXPECT_EQ(ta.bounces, 1000u);
  ASSERT_FALSE(ta.running.empty());
  EXPECT_EQ(ta.running.front().first, 1u);
  EXPECT_EQ(ta.running.back().first, 1000u);
  EXPECT_EQ(ta.running.back().second, ta.mean);
  EXPECT_THROW(time_average(t, ReflectionLaw::elastic(), Observable::chord_length(), {{0.1, 0.1}, {1, 0}}, 10),
               TraceFailure);
}

TEST(Birkhoff, SinaiTimeAndSpaceAveragesAgree) {
  const Table t = make_preset("torus-two-balls");
  const AverageReport r =
      birkhoff_report(t, ReflectionLaw::elastic(), Observable::chord_length(), 3, 30000, 50000, 5, 1);
  EXPECT_EQ(r.agreeing(0.03), 3);
}

TEST(Birkhoff, DeltaFObservableMatchesLength) {
  const Table t = make_preset("hyperbolic-disk-1");
  const LyapunovF F = build_well_balanced_F(t);
  const SpaceAverage a = space_average(t, Observable::delta_f(F), 20000, 6, 1);
  const SpaceAverage b = space_average(t, Observable::chord_length(), 20000, 6, 1);
  EXPECT_NEAR(a.estimate.mean(), b.estimate.mean(), 1e-9);
}

TEST(Recurrence, DiskBoxReturns) {
  PhaseBox U;
  U.piece = 0;
  U.pos[0] = {0.0, 0.1};
  U.dir[0] = {0.4, 0.6};
  const RecurrenceResult r = recurrence_test(make_preset("disk"), ReflectionLaw::elastic(), U, 100, 2000, 1, 1);
  EXPECT_GT(r.returned_fraction, 0.99);
  EXPECT_EQ(r.starters, 100u);
}

TEST(Inequalities, DiskReport) {
  const Table disk = make_preset("disk");
  InequalityOptions opt;
  opt.probe_samples = 20000;
  opt.slice_samples = 20000;
  opt.slice_points = 50;
  const InequalityReport r = inequality_report(disk, build_well_balanced_F(disk), opt);
  EXPECT_TRUE(r.all_pass());
  const InequalityCheck* gd = r.find("diameter_volume");
  ASSERT_NE(gd, nullptr);
  EXPECT_NEAR(gd->margin, 4.0 / M_PI, 0.01);
  EXPECT_NEAR(r.gd_estimate, 2.0, 1e-6);
  ASSERT_NE(r.find("slice_area_bound"), nullptr);
  ASSERT_NE(r.find("slice_integral_identity"), nullptr);
  EXPECT_EQ(r.find("no_such_check"), nullptr);
}

TEST(Recurrence, ZeroBouncesAndMonotoneCounts) {
  const Table disk = make_preset("disk");
  PhaseBox U;
  U.piece = 0;
  U.pos[0] = {0.0, 0.3};
  U.dir[0] = {-0.2, 0.2};
  const RecurrenceResult none = recurrence_test(disk, ReflectionLaw::elastic(), U, 50, 0, 2, 1);
  EXPECT_EQ(none.returned_fraction, 0.0);
  EXPECT_EQ(none.mean_return_count, 0.0);
  double previous = 0.0;
  for (std::uint64_t m : {10u, 100u, 1000u}) {
    const RecurrenceResult r = recurrence_test(disk, ReflectionLaw::elastic(), U, 50, m, 2, 1);
    EXPECT_GE(r.mean_return_count, previous);
    previous = r.mean_return_count;
  }
}

TEST(HearVolume, RoundTripOnNonTrappingPresets) {
  for (const std::string name : {"disk", "ball3", "ellipse", "torus-two-balls", "hyperbolic-disk-1",
                                 "spherical-cap-pi4"}) {
    const Table t = make_preset(name);
    const DomainVolumes v = domain_volumes(t);
    const SpaceAverage a = space_average(t, Observable::chord_length(), 40000, 7, 1);
    const double heard = hear_volume({a.estimate.mean()}, v.vol_dM, t.space().dim()).back();
    const double se = heard * a.estimate.std_error() / a.estimate.mean();
    EXPECT_LT(std::fabs(heard - v.vol_M), 4.0 * se + 1e-3 * v.vol_M) << name;
  }
}
