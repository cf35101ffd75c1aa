#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace billiards;
using namespace billiards::testing;

TEST(Measure, DensityIsInwardCosine) {
  const Table disk = make_preset("disk");
  for (double th : {-1.2, -0.3, 0.0, 0.7, 1.5}) {
    const PhasePoint z{{1, 0}, {-std::cos(th), std::sin(th)}};
    const auto d = mu_theta_density(disk, z);
    ASSERT_TRUE(d);
    EXPECT_NEAR(*d, std::cos(th), 1e-15);
  }
  EXPECT_FALSE(mu_theta_density(disk, {{0, 0}, {1, 0}}));
}

TEST(Measure, BoundaryAndTrajectoryVolumes) {
  EXPECT_NEAR(boundary_volume(make_preset("disk")), 2.0 * M_PI, 1e-12);
  EXPECT_NEAR(boundary_volume(make_preset("ball3")), 4.0 * M_PI, 1e-12);
  EXPECT_NEAR(boundary_volume(make_preset("hyperbolic-disk-2")), 2.0 * M_PI * std::sinh(2.0), 1e-11);
  EXPECT_NEAR(boundary_volume(make_preset("spherical-cap-pi4")), 2.0 * M_PI * std::sin(M_PI / 4), 1e-12);
  EXPECT_NEAR(boundary_volume(make_preset("torus-one-ball")), 0.2 * M_PI, 1e-12);
  // Integrated cosine over inward directions: 2 in the plane, pi in space.
  EXPECT_NEAR(trajectory_space_volume(make_preset("disk")), 4.0 * M_PI, 1e-12);
  EXPECT_NEAR(trajectory_space_volume(make_preset("ball3")), 4.0 * M_PI * M_PI, 1e-11);
}

TEST(Measure, DomainVolumesClosedForm) {
  auto vol = [](const std::string& n) { return domain_volumes(make_preset(n)); };
  EXPECT_NEAR(vol("disk").vol_M, M_PI, 1e-12);
  EXPECT_NEAR(vol("ball3").vol_M, 4.0 * M_PI / 3.0, 1e-12);
  EXPECT_NEAR(vol("ellipse").vol_M, M_PI * 1.2 * 0.8, 1e-9);
  EXPECT_NEAR(vol("torus-one-ball").vol_M, 1.0 - M_PI * 0.01, 1e-12);
  EXPECT_NEAR(vol("torus-two-balls").vol_M, 1.0 - M_PI * (0.16 + 0.0144), 1e-12);
  for (double R : {0.5, 1.0, 2.0}) {
    const std::string n = R == 0.5 ? "hyperbolic-disk-0.5" : R == 1.0 ? "hyperbolic-disk-1" : "hyperbolic-disk-2";
    EXPECT_NEAR(vol(n).vol_M, 2.0 * M_PI * (std::cosh(R) - 1.0), 1e-11) << n;
  }
  EXPECT_NEAR(vol("spherical-cap-pi6").vol_M, 2.0 * M_PI * (1.0 - std::cos(M_PI / 6)), 1e-12);
  EXPECT_TRUE(vol("disk").analytic);
}

TEST(Measure, MonteCarloVolumesAgree) {
  for (const auto& name : all_presets()) {
    const Table t = make_preset(name);
    const DomainVolumes exact = domain_volumes(t);
    const DomainVolumes mc = domain_volumes_monte_carlo(t, 200000, 3, 1);
    EXPECT_NEAR(mc.vol_M, exact.vol_M, 4.0 * mc.vol_M_stderr + 1e-12) << name;
  }
}

TEST(Measure, SampleSetNormalization) {
  const Table disk = make_preset("disk");
  const WeightedSampleSet s = sample_mu_theta(disk, 10000, 1, 1);
  EXPECT_EQ(s.points.size(), 10000u);
  EXPECT_NEAR(s.normalization, 4.0 * M_PI, 1e-12);
  EXPECT_NEAR(s.weight() * 10000, 4.0 * M_PI, 1e-12);
  // Importance-weighted estimate of vol_Theta from full-circle fiber draws;
  // outward directions carry no mass.
  const BoundarySampler sampler(disk);
  Estimate e;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    CounterRng rng(2, streams::uniform_fiber, i);
    const auto d = mu_theta_density(disk, sampler.draw_uniform_fiber(rng));
    e.add(std::fmax(*d, 0.0) * sampler.total_area() * 2.0 * M_PI);
  }
  EXPECT_NEAR(e.mean(), 4.0 * M_PI, 3.0 * e.std_error());
  EXPECT_THROW(sample_mu_theta(disk, 0, 1), BilliardError);
}

TEST(Preservation, ElasticMapPreservesMeasure) {
  for (const std::string name : {"disk", "ellipse", "torus-two-balls", "hyperbolic-disk-1", "spherical-cap-pi4"}) {
    const Table t = make_preset(name);
    const auto boxes = random_phase_boxes(t, 10, 4);
    const PreservationReport r = measure_preservation_test(t, ReflectionLaw::elastic(), boxes, 100000, 4, 1);
    EXPECT_LT(r.max_abs_z(), 4.0) << name;
    EXPECT_EQ(r.boxes.size(), 10u);
  }
}

TEST(Preservation, DetectsANonInvariantMap) {
  const Table t = make_preset("disk");
  const auto boxes = random_phase_boxes(t, 10, 4);
  const PreservationReport r =
      measure_preservation_test(t, ReflectionLaw::rescaled({3.0, 0.6}), boxes, 100000, 4, 1);
  EXPECT_GT(r.max_abs_z(), 10.0);
}

TEST(Preservation, EmptyBoxIsDegenerate) {
  const Table t = make_preset("disk");
  PhaseBox empty;
  empty.piece = 0;
  empty.pos[0] = {1.0, 1.0};
  EXPECT_THROW(measure_preservation_test(t, ReflectionLaw::elastic(), {empty}, 5000, 1, 1), BilliardError);
}

TEST(Preservation, BoxesAreReproducible) {
  const Table t = make_preset("torus-two-balls");
  const auto a = random_phase_boxes(t, 20, 9), b = random_phase_boxes(t, 20, 9);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].piece, b[i].piece);
    EXPECT_EQ(a[i].pos[0].lo, b[i].pos[0].lo);
    EXPECT_EQ(a[i].dir[0].hi, b[i].dir[0].hi);
  }
}

TEST(Measure, DensitySignMatchesStratum) {
  for (const auto& name : all_presets()) {
    const Table t = make_preset(name);
    const BoundarySampler sampler(t);
    for (std::uint64_t i = 0; i < 2000; ++i) {
      CounterRng rng(8, streams::uniform_fiber, i);
      const PhasePoint z = sampler.draw_uniform_fiber(rng);
      const auto d = mu_theta_density(t, z);
      const auto s = classify_boundary_point(t, z);
      ASSERT_TRUE(d && s) << name;
      if (s->label == StratumLabel::transversal_in) {
        EXPECT_GT(*d, 0.0) << name;
      } else if (s->label == StratumLabel::transversal_out) {
        EXPECT_LT(*d, 0.0) << name;
      }
    }
  }
}

TEST(Measure, HalfDiskBoundaryHasHalfTheMass) {
  const Table disk = make_preset("disk");
  PhaseBox K;
  K.piece = 0;
  K.pos[0] = {0.0, M_PI};
  const PreservationReport r = measure_preservation_test(disk, ReflectionLaw::elastic(), {K}, 100'000, 9, 1);
  const Estimate& mass = r.boxes[0].mu_K;
  EXPECT_LT(std::fabs(mass.mean() / r.total_mass - 0.5), 4.0 * mass.std_error() / r.total_mass);
}
