// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0
//
// Procedural occupancy scenes for tests and demos: a one-voxel ground layer
// plus randomly placed boxes and vertical cylinders, and a six-camera
// surround rig at the ego origin.

#ifndef MPI_FORGE_SYNTH_HPP
#define MPI_FORGE_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "mpi_forge/geometry.hpp"

namespace mpi_forge {

enum class Shape { Box, Cylinder };

struct ObjectSpec {
  Label label{Label::Car};
  int count{0};
  Shape shape{Shape::Box};
  /// Size ranges in meters (x, y, height). For cylinders x is the diameter.
  Vec3 min_size{1, 1, 1};
  Vec3 max_size{1, 1, 1};
};

struct RigSpec {
  int width{1600};
  int height{900};
  double focal{1260.0};
  double mount_height{0.0};
};

struct SceneRecipe {
  std::uint64_t seed{0};
  GridSpec grid{GridSpec{{500, 500, 40}, {-50.0, -50.0, -5.0}, 0.2}};
  Label ground_label{Label::DriveableSurface};  ///< Free disables the ground
  double ground_height{-1.8};                   ///< the ground layer contains this z
  double placement_radius{40.0};                ///< object centers within |x|, |y| <= this
  double clear_radius{3.0};                     ///< and farther than this from the origin
  std::vector<ObjectSpec> objects{default_objects()};
  RigSpec rig;

  static std::vector<ObjectSpec> default_objects();

  /// Throws ConfigError for negative counts or non-positive size ranges.
  void validate() const;
};

struct PlacedObject {
  Label label{Label::Free};
  Shape shape{Shape::Box};
  Vec3 min, max;  ///< world bounds; for cylinders the bounding box
};

struct SynthScene {
  OccupancyGrid grid;
  CameraRig rig;
  std::vector<PlacedObject> objects;
};

/// Deterministic in the recipe. Objects are rejection-sampled so their
/// bounds do not overlap; any object that cannot be placed is dropped. Only
/// Free voxels are written, so earlier content always wins.
SynthScene synth_scene(const SceneRecipe& recipe);

/// Six cameras at yaw 0, -55, -110, 180, 110, 55 degrees (x forward, y left,
/// z up).
CameraRig surround_rig(const RigSpec& spec);

/// Index of the ground layer, or -1 when there is none.
int ground_layer(const SceneRecipe& recipe);

}  // namespace mpi_forge

#endif  // MPI_FORGE_SYNTH_HPP
