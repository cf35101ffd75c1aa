#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace billiards;
using namespace billiards::testing;

namespace {

/// Torus with two equal obstacles swapped by the half-period translation.
Table symmetric_torus() {
  return Table(ModelSpace::flat_torus({1.0, 1.0}),
               {BoundaryPiece{BallShape{{0.25, 0.25}, 0.15}, Side::obstacle},
                BoundaryPiece{BallShape{{0.75, 0.75}, 0.15}, Side::obstacle}},
               {}, "symmetric-torus");
}

}  // namespace

TEST(Conjugacy, SymmetriesHaveZeroResidual) {
  const Table disk = make_preset("disk");
  EXPECT_LT(conjugacy_residual(disk, disk, conjugacy::rotation(0.7), 5000, 1, 1).max_residual, 1e-12);
  EXPECT_LT(conjugacy_residual(disk, disk, conjugacy::reflection(), 5000, 1, 1).max_residual, 1e-12);
  const Table cap = make_preset("spherical-cap-pi4");
  EXPECT_LT(conjugacy_residual(cap, cap, conjugacy::rotation(1.3), 5000, 1, 1).max_residual, 1e-12);
  const Table torus = symmetric_torus();
  const auto r = conjugacy_residual(torus, torus, conjugacy::torus_translation(torus.space(), {0.5, 0.5}), 5000, 1, 1);
  EXPECT_LT(r.max_residual, 1e-12);
  EXPECT_EQ(r.samples + r.skipped, 5000u);
  EXPECT_EQ(r.invalid_image, 0u);
}

TEST(Conjugacy, DistinctTablesAreDetected) {
  const Table disk = make_preset("disk"), ellipse = make_preset("ellipse");
  const auto r = conjugacy_residual(disk, ellipse, conjugacy::coordinate_transfer(disk, ellipse), 5000, 1, 1);
  EXPECT_GT(r.mean_residual, 0.1);
  // A rotation is not a symmetry of the ellipse: it moves boundary points off the wall.
  const auto rot = conjugacy_residual(ellipse, ellipse, conjugacy::rotation(0.5), 5000, 1, 1);
  EXPECT_GT(rot.invalid_image, 0u);
  EXPECT_TRUE(std::isinf(rot.max_residual));
}

TEST(Scattering, FMonotoneAlongChords) {
  const Table t = make_preset("spherical-cap-pi6");
  const LyapunovF F = build_well_balanced_F(t);
  const ScatteringDataset d = scattering_random(t, &F, 2000, 1, 1);
  ASSERT_FALSE(d.records.empty());
  for (const auto& r : d.records) {
    const auto c = causality_map(t, r.entry);
    ASSERT_TRUE(c);
    ASSERT_NEAR(r.F_exit - r.F_entry, c->length, 1e-9);
  }
}

TEST(Reconstruction, DiskCloudFillsDomain) {
  const Table disk = make_preset("disk");
  const LyapunovF F = build_well_balanced_F(disk);
  const ScatteringDataset d = scattering_grid(disk, &F, 32, 32, 1);
  const ChordCloud cloud = reconstruct_chords(d, disk.space(), 0.02);
  ASSERT_GT(cloud.points.size(), 1000u);
  double depth = -1.0;
  for (const Vec& q : cloud.points) depth = std::max(depth, disk.gauge(q));
  EXPECT_LT(depth, 1e-9);
  EXPECT_LT(hausdorff_domain_to_cloud(disk, cloud.points, 100), 0.08);
}

TEST(Reconstruction, TorusWithoutF) {
  const Table t = make_preset("torus-two-balls");
  const ScatteringDataset d = scattering_grid(t, nullptr, 24, 24, 1);
  const ChordCloud cloud = reconstruct_chords(d, t.space(), 0.01);
  double depth = -1.0;
  for (const Vec& q : cloud.points) depth = std::max(depth, t.gauge(q));
  EXPECT_LT(depth, 1e-9);
  EXPECT_EQ(cloud.ambiguous, 0u);
  EXPECT_LT(hausdorff_domain_to_cloud(t, cloud.points, 100), 0.1);
}

TEST(Atlas, DiskHasNoDiscontinuities) {
  const Table disk = make_preset("disk");
  const TrajectoryAtlas a = trajectory_atlas(disk, nullptr, 32, 32, 1);
  EXPECT_EQ(a.discontinuity_count(), 0u);
  EXPECT_EQ(a.cells.size(), 32u * 32u);
}

TEST(Atlas, SinaiDiscontinuitiesScale) {
  const Table t = make_preset("torus-two-balls");
  const auto coarse = trajectory_atlas(t, nullptr, 128, 128, 1).discontinuity_count();
  const auto fine = trajectory_atlas(t, nullptr, 256, 256, 1).discontinuity_count();
  ASSERT_GT(coarse, 0u);
  const double ratio = static_cast<double>(fine) / static_cast<double>(coarse);
  EXPECT_GE(ratio, 1.0);
  EXPECT_LE(ratio, 4.0);
}

TEST(Atlas, RejectsUnsupportedInput) {
  EXPECT_THROW(trajectory_atlas(make_preset("ball3"), nullptr, 16, 16, 1), BilliardError);
  EXPECT_THROW(trajectory_atlas(make_preset("disk"), nullptr, 4, 16, 1), BilliardError);
}
