#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace billiards;
using namespace billiards::testing;

namespace {

/// Oracle for F: bisection on the distance to the body center along the
/// backward geodesic.
double bisected_F(const ModelSpace& sp, const EnclosingBody& body, const PhasePoint& z) {
  const PhasePoint back{z.q, -z.v};
  auto outside = [&](double s) { return sp.distance(body.center, geodesic_flow(sp, back, s).q) > body.radius; };
  double lo = 0.0, hi = 1e-3;
  while (!outside(hi)) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (outside(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(LyapunovF, DiskClosedForm) {
  const Table disk = make_preset("disk");
  const EnclosingBody body = default_enclosing_body(disk);
  EXPECT_NEAR(body.radius, 2.0, 1e-12);
  const LyapunovF F = build_well_balanced_F(disk);
  CounterRng rng(1, 0, 0);
  for (int k = 0; k < 1000; ++k) {
    const Vec q{rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)};
    const double a = rng.uniform(0.0, 2.0 * M_PI);
    const Vec v{std::cos(a), std::sin(a)};
    const double qv = dot(q, v);
    ASSERT_NEAR(F({q, v}), qv + std::sqrt(qv * qv - dot(q, q) + 4.0), 1e-12);
  }
  EXPECT_NEAR(F({{1, 0}, {-1, 0}}), 1.0, 1e-15);
  EXPECT_NEAR(F({{1, 0}, {1, 0}}), 3.0, 1e-15);
}

TEST(LyapunovF, MatchesBisectionOracle) {
  for (const auto& name : bounded_presets()) {
    const Table t = make_preset(name);
    const LyapunovF F = build_well_balanced_F(t);
    const BoundarySampler sampler(t);
    for (std::uint64_t i = 0; i < 100; ++i) {
      CounterRng rng(2, streams::uniform_fiber, i);
      const PhasePoint z = sampler.draw_uniform_fiber(rng);
      ASSERT_NEAR(F(z), bisected_F(t.space(), F.body(), z), 1e-9) << name;
    }
  }
}

TEST(LyapunovF, DeltaFEqualsChordLength) {
  for (const auto& name : bounded_presets()) {
    const Table t = make_preset(name);
    const LyapunovF F = build_well_balanced_F(t);
    const BoundarySampler sampler(t);
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 2000; ++i) {
      const PhasePoint z = draw_boundary(sampler, 3, i);
      const auto c = causality_map(t, z);
      ASSERT_TRUE(c);
      const auto d = delta_F(t, F, z);
      ASSERT_TRUE(d);
      worst = std::max(worst, std::fabs(*d - c->length));
      const auto [cb, cf] = F.crossing_cosines(z);
      ASSERT_GT(cb, 0.0) << name;
      ASSERT_GT(cf, 0.0) << name;
    }
    EXPECT_LT(worst, 1e-9) << name;
  }
}

TEST(LyapunovF, BodyValidation) {
  const Table disk = make_preset("disk");
  try {
    build_well_balanced_F(disk, {{0, 0}, 0.5});
    FAIL() << "expected body_too_small";
  } catch (const BilliardError& e) {
    EXPECT_EQ(e.code(), BilliardError::Code::body_too_small);
  }
  try {
    build_well_balanced_F(make_preset("torus-two-balls"));
    FAIL() << "expected unsupported";
  } catch (const BilliardError& e) {
    EXPECT_EQ(e.code(), BilliardError::Code::unsupported);
  }
  EXPECT_TRUE(std::isnan(LyapunovF(disk.space(), {{0, 0}, 2.0})({{3, 0}, {1, 0}})));
}

TEST(LyapunovF, BoundaryVariationOnDisk) {
  const Table disk = make_preset("disk");
  const FVariation v = var_F_boundary(disk, build_well_balanced_F(disk), 50000, 1, 1);
  EXPECT_NEAR(v.F_min, 1.0, 1e-3);
  EXPECT_NEAR(v.F_max, 3.0, 1e-3);
  EXPECT_NEAR(v.var, 2.0, 2e-3);
}

TEST(Slices, DiskIntegralAndBound) {
  const Table disk = make_preset("disk");
  const LyapunovF F = build_well_balanced_F(disk);
  const SliceCurve c = slice_area_curve(disk, F, 60, 40000, 1, 1);
  EXPECT_NEAR(c.integral, 2.0 * M_PI * M_PI, 0.03 * 2.0 * M_PI * M_PI);
  EXPECT_NEAR(c.total_mass, 4.0 * M_PI, 1e-12);
  for (const auto& a : c.area) EXPECT_LE(a.mean(), 4.0 * M_PI * (1.0 + 1e-12));
  const Estimate mid = slice_area(disk, F, 2.0, 40000, 1, 1);
  EXPECT_GT(mid.mean(), 0.0);
}

TEST(Slices, IndependentOfWorkers) {
  const Table t = make_preset("hyperbolic-disk-1");
  const LyapunovF F = build_well_balanced_F(t);
  const SliceCurve a = slice_area_curve(t, F, 20, 10000, 5, 1);
  const SliceCurve b = slice_area_curve(t, F, 20, 10000, 5, 4);
  EXPECT_EQ(a.integral, b.integral);
  for (std::size_t k = 0; k < a.area.size(); ++k) EXPECT_TRUE(a.area[k] == b.area[k]);
}
