// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#include "mpi_forge/synth.hpp"

#include <cmath>
#include <numbers>

#include "mpi_forge/random.hpp"

namespace mpi_forge {

std::vector<ObjectSpec> SceneRecipe::default_objects() {
  return {
      {Label::Car, 12, Shape::Box, {3.8, 1.6, 1.4}, {4.8, 2.0, 1.8}},
      {Label::Truck, 2, Shape::Box, {6.0, 2.3, 2.6}, {9.0, 2.6, 3.6}},
      {Label::Pedestrian, 10, Shape::Cylinder, {0.4, 0.4, 1.6}, {0.6, 0.6, 1.9}},
      {Label::TrafficCone, 8, Shape::Cylinder, {0.3, 0.3, 0.6}, {0.4, 0.4, 0.8}},
      {Label::Barrier, 4, Shape::Box, {2.0, 0.4, 0.8}, {4.0, 0.6, 1.0}},
      {Label::Manmade, 6, Shape::Box, {6.0, 6.0, 4.0}, {12.0, 12.0, 4.6}},
      {Label::Vegetation, 10, Shape::Cylinder, {1.5, 1.5, 3.0}, {3.0, 3.0, 4.5}},
  };
}

void SceneRecipe::validate() const {
  (void)GridSpec::create(grid.dims, grid.origin, grid.resolution);
  if (!(placement_radius > 0) || !(clear_radius >= 0)) throw ConfigError("placement radii must be positive");
  for (const auto& o : objects) {
    if (o.count < 0) throw ConfigError("object counts must be non-negative");
    if (!(o.min_size.array() > 0).all() || !(o.max_size.array() >= o.min_size.array()).all())
      throw ConfigError("object size ranges must be positive and ordered");
    if (o.label == Label::Free) throw ConfigError("objects must not be free space");
  }
  if (rig.width <= 0 || rig.height <= 0 || !(rig.focal > 0)) throw ConfigError("rig image size and focal must be positive");
}

int ground_layer(const SceneRecipe& recipe) {
  if (recipe.ground_label == Label::Free) return -1;
  const double q = std::floor((recipe.ground_height - recipe.grid.origin.z()) / recipe.grid.resolution);
  if (q < 0 || q >= recipe.grid.dims.z()) return -1;
  return static_cast<int>(q);
}

CameraRig surround_rig(const RigSpec& spec) {
  static constexpr std::array<double, 6> kYawDeg = {0, -55, -110, 180, 110, 55};
  static const std::array<std::string, 6> kNames = {"CAM_FRONT", "CAM_FRONT_RIGHT", "CAM_BACK_RIGHT",
                                                    "CAM_BACK", "CAM_BACK_LEFT", "CAM_FRONT_LEFT"};
  Mat3 K;
  K << spec.focal, 0, spec.width / 2.0, 0, spec.focal, spec.height / 2.0, 0, 0, 1;
  std::vector<CameraModel> cams;
  for (double deg : kYawDeg) {
    const double yaw = deg * std::numbers::pi / 180.0;
    const double c = std::cos(yaw), s = std::sin(yaw);
    Mat3 R;
    // Columns: camera right, down and forward expressed in the world frame.
    R.col(0) = Vec3(s, -c, 0);
    R.col(1) = Vec3(0, 0, -1);
    R.col(2) = Vec3(c, s, 0);
    cams.push_back(CameraModel::create(K, R, Vec3(0, 0, spec.mount_height), spec.width, spec.height));
  }
  return CameraRig::create(std::move(cams), {kNames.begin(), kNames.end()});
}

namespace {

bool overlaps(const PlacedObject& a, const PlacedObject& b, double margin) {
  return ((a.min.array() - margin) < b.max.array()).all() && ((b.min.array() - margin) < a.max.array()).all();
}

void rasterize(OccupancyGrid& grid, const PlacedObject& o) {
  const auto& spec = grid.spec();
  const Vec3 center = (o.min + o.max) / 2.0;
  const double r = (o.max.x() - o.min.x()) / 2.0;
  for (int x = 0; x < spec.dims.x(); ++x) {
    const double cx = spec.origin.x() + (x + 0.5) * spec.resolution;
    if (cx < o.min.x() || cx > o.max.x()) continue;
    for (int y = 0; y < spec.dims.y(); ++y) {
      const double cy = spec.origin.y() + (y + 0.5) * spec.resolution;
      if (cy < o.min.y() || cy > o.max.y()) continue;
      if (o.shape == Shape::Cylinder) {
        const double dx = cx - center.x(), dy = cy - center.y();
        if (dx * dx + dy * dy > r * r) continue;
      }
      for (int z = 0; z < spec.dims.z(); ++z) {
        const double cz = spec.origin.z() + (z + 0.5) * spec.resolution;
        if (cz < o.min.z() || cz > o.max.z()) continue;
        const VoxelIndex i(x, y, z);
        if (grid.at(i) == Label::Free) grid.set(i, o.label);
      }
    }
  }
}

}  // namespace

SynthScene synth_scene(const SceneRecipe& recipe) {
  recipe.validate();
  const auto& spec = recipe.grid;
  SynthScene scene{OccupancyGrid(spec), surround_rig(recipe.rig), {}};
  Rng rng(recipe.seed);

  const int gz = ground_layer(recipe);
  if (gz >= 0)
    for (int x = 0; x < spec.dims.x(); ++x)
      for (int y = 0; y < spec.dims.y(); ++y) scene.grid.set({x, y, gz}, recipe.ground_label);
  const double base = gz >= 0 ? spec.origin.z() + (gz + 1) * spec.resolution : recipe.ground_height;

  for (const auto& kind : recipe.objects) {
    for (int n = 0; n < kind.count; ++n) {
      for (int attempt = 0; attempt < 100; ++attempt) {
        Vec3 size;
        for (int a = 0; a < 3; ++a) size[a] = uniform(rng, kind.min_size[a], kind.max_size[a]);
        if (kind.shape == Shape::Cylinder) size.y() = size.x();
        const double cx = uniform(rng, -recipe.placement_radius, recipe.placement_radius);
        const double cy = uniform(rng, -recipe.placement_radius, recipe.placement_radius);
        if (std::hypot(cx, cy) < recipe.clear_radius + size.head<2>().norm() / 2) continue;
        PlacedObject o{kind.label, kind.shape, Vec3(cx - size.x() / 2, cy - size.y() / 2, base),
                       Vec3(cx + size.x() / 2, cy + size.y() / 2, base + size.z())};
        bool clash = false;
        for (const auto& other : scene.objects) clash = clash || overlaps(o, other, spec.resolution);
        if (clash) continue;
        rasterize(scene.grid, o);
        scene.objects.push_back(o);
        break;
      }
    }
  }
  return scene;
}

}  // namespace mpi_forge
