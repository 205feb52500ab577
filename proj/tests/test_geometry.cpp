// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "mpi_forge/geometry.hpp"
#include "support/oracles.hpp"

using namespace mpi_forge;
using namespace mpi_forge::testing;

namespace {

CameraModel make_camera(const Mat3& K, const Vec3& t = Vec3::Zero(), int w = 16, int h = 16) {
  return CameraModel::create(K, Mat3::Identity(), t, w, h);
}

const GridSpec kBenchmarkGrid = GridSpec::create({500, 500, 40}, {-50, -50, -5}, 0.2);

}  // namespace

TEST(WorldFromPixel, IdentityCamera) {
  const auto cam = make_camera(Mat3::Identity());
  EXPECT_EQ(world_from_pixel(0.0, 0.0, 5.0, cam), Vec3(0, 0, 5));
}

TEST(WorldFromPixel, ScaledIntrinsicsMatchInverseTimesFrustumPoint) {
  Mat3 K = Mat3::Zero();
  K.diagonal() << 2, 2, 1;
  const auto cam = make_camera(K);
  // K^-1 (u d, v d, d) with u = v = 1, d = 4: (4 / 2, 4 / 2, 4).
  const Vec3 p = world_from_pixel(1.0, 1.0, 4.0, cam);
  EXPECT_DOUBLE_EQ(p.x(), 2.0);
  EXPECT_DOUBLE_EQ(p.y(), 2.0);
  EXPECT_DOUBLE_EQ(p.z(), 4.0);
}

TEST(WorldFromPixel, PureTranslation) {
  const auto cam = make_camera(Mat3::Identity(), Vec3(10, 0, 0));
  EXPECT_EQ(world_from_pixel(0.0, 0.0, 1.0, cam), Vec3(10, 0, 1));
}

TEST(WorldFromPixel, NegativeDepthRejected) {
  const auto cam = make_camera(Mat3::Identity());
  EXPECT_THROW(world_from_pixel(0.0, 0.0, -1.0, cam), ConfigError);
}

TEST(WorldFromPixel, IdentityReproducesScaledPixelOnRandomTriples) {
  const auto cam = make_camera(Mat3::Identity());
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform(rng, -2000, 2000), v = uniform(rng, -2000, 2000), d = uniform(rng, 0, 100);
    const Vec3 p = world_from_pixel(u, v, d, cam);
    const Vec3 want(u * d, v * d, d);
    for (int a = 0; a < 3; ++a) EXPECT_LE(std::abs(p[a] - want[a]), 1e-12 * std::max(1.0, std::abs(want[a])));
  }
}

TEST(WorldFromPixel, RotationAndTranslationAgreeWithHandComposition) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const GridSpec spec = random_spec(rng, 8);
    const auto cam = random_camera(rng, spec, 32, 24);
    const double u = uniform(rng, 0, 32), v = uniform(rng, 0, 24), d = uniform(rng, 0, 30);
    // Solve K x = (u d, v d, d) by back-substitution on the upper-triangular K.
    const Mat3& K = cam.intrinsics();
    const double z = d;
    const double y = (v * d - K(1, 2) * z) / K(1, 1);
    const double x = (u * d - K(0, 1) * y - K(0, 2) * z) / K(0, 0);
    const Vec3 want = cam.rotation() * Vec3(x, y, z) + cam.translation();
    EXPECT_LT((world_from_pixel(u, v, d, cam) - want).norm(), 1e-9);
  }
}

TEST(WorldFromPixel, SinglePrecisionInstantiation) {
  using CameraF = Camera<float>;
  const auto cam = CameraF::create(Eigen::Matrix3f::Identity() * 2.0f, Eigen::Matrix3f::Identity(),
                                   Eigen::Vector3f::Zero(), 8, 8);
  // K = 2 I scales the last row too, so K^-1 (d, d, d) = (d, d, d) / 2.
  EXPECT_EQ(world_from_pixel(1.0f, 1.0f, 4.0f, cam), Eigen::Vector3f(2, 2, 2));
}

TEST(Camera, RejectsInvalidParameters) {
  Mat3 K = Mat3::Identity();
  EXPECT_NO_THROW(make_camera(K));
  Mat3 bad = K;
  bad(0, 0) = 0;
  EXPECT_THROW(make_camera(bad), ConfigError);
  bad = K;
  bad(1, 1) = -1;
  EXPECT_THROW(make_camera(bad), ConfigError);
  Mat3 skewed = 2 * Mat3::Identity();
  EXPECT_THROW(CameraModel::create(K, skewed, Vec3::Zero(), 4, 4), ConfigError);
  Mat3 reflection = Mat3::Identity();
  reflection(2, 2) = -1;
  EXPECT_THROW(CameraModel::create(K, reflection, Vec3::Zero(), 4, 4), ConfigError);
  EXPECT_THROW(CameraModel::create(K, Mat3::Identity(), Vec3(NAN, 0, 0), 4, 4), ConfigError);
  EXPECT_THROW(CameraModel::create(K, Mat3::Identity(), Vec3::Zero(), 0, 4), ConfigError);
  Mat3 singular = K;
  singular(2, 2) = 0;
  EXPECT_THROW(make_camera(singular), ConfigError);
}

TEST(ScaleIntrinsics, Factors) {
  Mat3 K;
  K << 1000, 0, 800, 0, 1000, 450, 0, 0, 1;
  const auto cam = CameraModel::create(K, Mat3::Identity(), Vec3(1, 2, 3), 1600, 900);
  EXPECT_EQ(scale_intrinsics(cam, 1.0), cam);
  const auto wide = scale_intrinsics(cam, 0.8);
  EXPECT_DOUBLE_EQ(wide.fx(), 800.0);
  EXPECT_DOUBLE_EQ(wide.fy(), 800.0);
  EXPECT_EQ(wide.cx(), cam.cx());
  EXPECT_EQ(wide.cy(), cam.cy());
  EXPECT_EQ(wide.rotation(), cam.rotation());
  EXPECT_EQ(wide.translation(), cam.translation());
  EXPECT_THROW(scale_intrinsics(cam, 0.0), ConfigError);
}

TEST(VoxelIndex, BenchmarkGrid) {
  // (0 - (-50)) / 0.2 = 250 and (0 - (-5)) / 0.2 = 25.
  EXPECT_EQ(voxel_index(Vec3(0, 0, 0), kBenchmarkGrid), VoxelIndex(250, 250, 25));
  EXPECT_EQ(voxel_index(Vec3(-50, -50, -5), kBenchmarkGrid), VoxelIndex(0, 0, 0));
  EXPECT_FALSE(voxel_index(Vec3(60, 0, 0), kBenchmarkGrid));
  EXPECT_FALSE(voxel_index(Vec3(NAN, 0, 0), kBenchmarkGrid));
  EXPECT_FALSE(voxel_index(Vec3(0, 0, 3.0), kBenchmarkGrid));
  EXPECT_EQ(kBenchmarkGrid.voxel_count(), 10'000'000);
}

TEST(VoxelIndex, UpperFaceIsExclusive) {
  const auto spec = GridSpec::create({4, 4, 4}, {0, 0, 0}, 0.5);
  EXPECT_EQ(voxel_index(Vec3(1.999, 0, 0), spec), VoxelIndex(3, 0, 0));
  EXPECT_FALSE(voxel_index(Vec3(2.0, 0, 0), spec));
  EXPECT_EQ(voxel_index(Vec3(0.5, 1.0, 1.5), spec), VoxelIndex(1, 2, 3));
}

TEST(VoxelIndex, DeterministicAndPure) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto spec = random_spec(rng, 16);
    const auto cam = random_camera(rng, spec, 16, 16);
    const double u = uniform(rng, 0, 16), v = uniform(rng, 0, 16), d = uniform(rng, 0, 20);
    const auto a = voxel_index(world_from_pixel(u, v, d, cam), spec);
    const auto b = voxel_index(world_from_pixel(u, v, d, cam), spec);
    EXPECT_EQ(a.has_value(), b.has_value());
    if (a && b) {
      EXPECT_EQ(*a, *b);
    }
  }
}

TEST(GridSpec, LinearIndexRoundTripsXMajor) {
  const auto spec = GridSpec::create({3, 4, 5}, {0, 0, 0}, 1);
  EXPECT_EQ(spec.linear_index({0, 0, 1}), 1);
  EXPECT_EQ(spec.linear_index({0, 1, 0}), 5);
  EXPECT_EQ(spec.linear_index({1, 0, 0}), 20);
  for (std::int64_t k = 0; k < spec.voxel_count(); ++k) EXPECT_EQ(spec.linear_index(spec.unlinear_index(k)), k);
}

TEST(GridSpec, Validation) {
  EXPECT_THROW(GridSpec::create({0, 1, 1}, Vec3::Zero(), 1), ConfigError);
  EXPECT_THROW(GridSpec::create({1, 1, 1}, Vec3::Zero(), 0), ConfigError);
  EXPECT_THROW(GridSpec::create({1, 1, 1}, Vec3(INFINITY, 0, 0), 1), ConfigError);
  EXPECT_THROW(GridSpec::create({65536, 65536, 2}, Vec3::Zero(), 1), ConfigError);
  EXPECT_THROW(OccupancyGrid(GridSpec::create({2, 2, 2}, Vec3::Zero(), 1), std::vector<Label>(7)), ConfigError);
}

TEST(LookupSemantic, CenterHitAndOutside) {
  const auto spec = GridSpec::create({4, 4, 4}, {-1, -1, -1}, 0.5);
  OccupancyGrid g(spec);
  g.set({1, 2, 3}, Label::Car);
  EXPECT_EQ(lookup_semantic(g, spec.voxel_center({1, 2, 3})), Label::Car);
  EXPECT_EQ(lookup_semantic(g, Vec3(5, 0, 0)), Label::Free);
  EXPECT_EQ(lookup_semantic(g, Vec3(-1.0001, 0, 0)), Label::Free);
}

TEST(LookupSemantic, SharedCornerBelongsToTheFloorVoxel) {
  // Eight voxels around the corner (1, 1, 1), each with its own label.
  const auto spec = GridSpec::create({2, 2, 2}, {0.5, 0.5, 0.5}, 0.5);
  OccupancyGrid g(spec);
  int next = 1;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) g.set({x, y, z}, static_cast<Label>(next++));
  // Floor-based containment: the corner lies in the voxel whose lower faces
  // it sits on, i.e. index (1, 1, 1) of the 2x2x2 neighborhood.
  Label expected = Label::Free;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) {
        const Vec3 lo = spec.origin + Vec3(x, y, z) * spec.resolution;
        const Vec3 hi = lo + Vec3::Constant(spec.resolution);
        const Vec3 p(1, 1, 1);
        if ((p.array() >= lo.array()).all() && (p.array() < hi.array()).all()) expected = g.at({x, y, z});
      }
  EXPECT_EQ(expected, g.at({1, 1, 1}));
  EXPECT_EQ(lookup_semantic(g, Vec3(1, 1, 1)), expected);
}

TEST(LookupSemantic, AgreesWithBruteForceOnSmallGrids) {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    // Dyadic resolution and origin keep voxel faces exactly representable.
    const VoxelIndex dims(uniform_int(rng, 1, 16), uniform_int(rng, 1, 16), uniform_int(rng, 1, 16));
    const double res = std::ldexp(1.0, uniform_int(rng, -3, 1));
    const auto spec = GridSpec::create(dims, Vec3(-uniform_int(rng, 0, 4), -uniform_int(rng, 0, 4), -1), res);
    const auto grid = random_grid(rng, spec, 0.5);
    for (int i = 0; i < 100; ++i) {
      Vec3 p;
      for (int a = 0; a < 3; ++a) p[a] = uniform(rng, spec.origin[a] - 1, spec.extent_max()[a] + 1);
      ASSERT_EQ(lookup_semantic(grid, p), brute_force_lookup(grid, p)) << p.transpose();
    }
  }
}

TEST(CameraRig, Validation) {
  const auto cam = make_camera(Mat3::Identity());
  EXPECT_THROW(CameraRig::create({}, {}), ConfigError);
  EXPECT_THROW(CameraRig::create({cam}, {"a", "b"}), ConfigError);
  EXPECT_THROW(CameraRig::create({cam, cam}, {"a", "a"}), ConfigError);
  EXPECT_EQ(CameraRig::create({cam, cam}, {"a", "b"}).size(), 2u);
}

TEST(Labels, IdsAndNames) {
  EXPECT_EQ(to_id(Label::TrafficCone), 8);
  EXPECT_EQ(label_name(Label::Vegetation), "vegetation");
  EXPECT_EQ(label_name(Label::Unknown), "unknown");
  EXPECT_FALSE(is_valid_label_id(17));
  EXPECT_FALSE(is_valid_label_id(99));
  EXPECT_TRUE(is_valid_label_id(255));
  EXPECT_FALSE(is_occupied(Label::Free));
  EXPECT_FALSE(is_occupied(Label::Unknown));
  EXPECT_TRUE(is_occupied(Label::Car));
}
