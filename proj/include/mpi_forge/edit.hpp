// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0
//
// Declarative voxel-space edits. Regions are given in world meters and a
// voxel belongs to a region when its center does (bounds inclusive).

#ifndef MPI_FORGE_EDIT_HPP
#define MPI_FORGE_EDIT_HPP

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mpi_forge/errors.hpp"
#include "mpi_forge/geometry.hpp"

namespace mpi_forge {

struct FillBox {
  Vec3 min, max;
  int label{0};
};

/// Vertical cylinder; only center.x() and center.y() are used.
struct FillCylinder {
  Vec3 center;
  double radius{0};
  double z_min{0}, z_max{0};
  int label{0};
};

struct EraseRegion {
  Vec3 min, max;
};

struct Repaint {
  Vec3 min, max;
  int from_label{0};
  int to_label{0};
};

/// Copies every voxel of the source region by `offset` rounded to whole
/// voxels. Reads see the grid as it was before this op.
struct CopyTranslate {
  Vec3 src_min, src_max, offset;
};

using EditOp = std::variant<FillBox, FillCylinder, EraseRegion, Repaint, CopyTranslate>;

struct EditScript {
  std::vector<EditOp> ops;
};

struct Diagnostic {
  std::size_t op_index{0};
  std::string field;
  std::string message;
};

std::string to_string(const Diagnostic& d);

/// Thrown by apply_edit_script before any voxel is touched.
class ScriptError : public ConfigError {
public:
  explicit ScriptError(std::vector<Diagnostic> diagnostics);
  [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
  std::vector<Diagnostic> diagnostics_;
};

/// Empty when the script is valid.
std::vector<Diagnostic> validate_script(const EditScript& script);

/// Applies the ops in order to a copy of `grid`. Voxels outside the grid are
/// skipped silently.
OccupancyGrid apply_edit_script(const OccupancyGrid& grid, const EditScript& script);

struct GridDiff {
  std::int64_t changed{0};
  /// Changed voxels keyed by their label in the first grid.
  std::array<std::int64_t, 256> removed_by_label{};
  /// Changed voxels keyed by their label in the second grid.
  std::array<std::int64_t, 256> added_by_label{};
};

/// Throws ConfigError when the grid specs differ.
GridDiff diff_grids(const OccupancyGrid& a, const OccupancyGrid& b);

}  // namespace mpi_forge

#endif  // MPI_FORGE_EDIT_HPP
