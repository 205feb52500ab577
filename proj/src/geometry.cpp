// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#include "mpi_forge/geometry.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace mpi_forge {

GridSpec GridSpec::create(const VoxelIndex& dims, const Vec3& origin, double resolution) {
  if ((dims.array() <= 0).any()) throw ConfigError("grid dims must be positive on every axis");
  if (!(resolution > 0) || !std::isfinite(resolution)) throw ConfigError("grid resolution must be positive");
  if (!origin.allFinite()) throw ConfigError("grid origin must be finite");
  GridSpec s{dims, origin, resolution};
  if (s.voxel_count() > std::numeric_limits<std::int32_t>::max())
    throw ConfigError("grid has too many voxels");
  return s;
}

OccupancyGrid::OccupancyGrid(GridSpec spec, Label fill)
    : spec_(std::move(spec)), labels_(static_cast<std::size_t>(spec_.voxel_count()), fill) {}

OccupancyGrid::OccupancyGrid(GridSpec spec, std::vector<Label> labels)
    : spec_(std::move(spec)), labels_(std::move(labels)) {
  if (static_cast<std::int64_t>(labels_.size()) != spec_.voxel_count())
    throw ConfigError("label count does not match grid dims");
  for (Label l : labels_)
    if (!is_valid_label_id(to_id(l))) throw ConfigError("grid holds an invalid label id " + std::to_string(to_id(l)));
}

CameraModel scale_intrinsics(const CameraModel& cam, double factor) {
  if (!(factor > 0) || !std::isfinite(factor)) throw ConfigError("intrinsics scale factor must be positive");
  Mat3 K = cam.intrinsics();
  K(0, 0) *= factor;
  K(1, 1) *= factor;
  return CameraModel::create(K, cam.rotation(), cam.translation(), cam.width(), cam.height());
}

CameraRig CameraRig::create(std::vector<CameraModel> cameras, std::vector<std::string> names) {
  if (cameras.empty()) throw ConfigError("camera rig needs at least one camera");
  if (cameras.size() != names.size()) throw ConfigError("camera rig needs one name per camera");
  std::set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second) throw ConfigError("duplicate camera name '" + n + "'");
  return CameraRig{std::move(cameras), std::move(names)};
}

}  // namespace mpi_forge
