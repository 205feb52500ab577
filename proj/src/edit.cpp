// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#include "mpi_forge/edit.hpp"

#include <algorithm>
#include <cmath>

namespace mpi_forge {

std::string to_string(const Diagnostic& d) {
  return "op " + std::to_string(d.op_index) + " field '" + d.field + "': " + d.message;
}

namespace {

std::string join(const std::vector<Diagnostic>& diags) {
  std::string s = "invalid edit script";
  for (const auto& d : diags) s += "\n  " + to_string(d);
  return s;
}

struct Validator {
  std::size_t index;
  std::vector<Diagnostic>& out;

  void fail(std::string field, std::string message) { out.push_back({index, std::move(field), std::move(message)}); }

  void finite(const Vec3& v, const char* field) {
    if (!v.allFinite()) fail(field, "must be finite");
  }
  void region(const Vec3& lo, const Vec3& hi, const char* lo_name, const char* hi_name) {
    finite(lo, lo_name);
    finite(hi, hi_name);
    static constexpr char kAxes[] = "xyz";
    for (int a = 0; a < 3; ++a)
      if (lo[a] > hi[a]) fail(lo_name, std::string(lo_name) + " > " + hi_name + " on " + kAxes[a]);
  }
  void label(int id, const char* field) {
    if (!is_valid_label_id(id)) fail(field, "unknown class id " + std::to_string(id));
  }

  void operator()(const FillBox& op) {
    region(op.min, op.max, "min", "max");
    label(op.label, "class");
  }
  void operator()(const FillCylinder& op) {
    finite(op.center, "center");
    if (!(op.radius > 0) || !std::isfinite(op.radius)) fail("radius", "must be positive");
    if (!std::isfinite(op.z_min) || !std::isfinite(op.z_max)) fail("z_min", "must be finite");
    else if (op.z_min > op.z_max) fail("z_min", "z_min > z_max");
    label(op.label, "class");
  }
  void operator()(const EraseRegion& op) { region(op.min, op.max, "min", "max"); }
  void operator()(const Repaint& op) {
    region(op.min, op.max, "min", "max");
    label(op.from_label, "from_class");
    label(op.to_label, "to_class");
  }
  void operator()(const CopyTranslate& op) {
    region(op.src_min, op.src_max, "src_min", "src_max");
    finite(op.offset, "offset");
  }
};

// Voxels whose centers lie in [lo, hi]. The index range is widened by one
// and then filtered with the exact center test.
template <typename Fn>
void for_each_voxel_in(const GridSpec& spec, const Vec3& lo, const Vec3& hi, Fn&& fn) {
  VoxelIndex first, last;
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor((lo[a] - spec.origin[a]) / spec.resolution - 0.5) - 1;
    const double l = std::ceil((hi[a] - spec.origin[a]) / spec.resolution - 0.5) + 1;
    first[a] = static_cast<int>(std::clamp(f, 0.0, static_cast<double>(spec.dims[a])));
    last[a] = static_cast<int>(std::clamp(l, -1.0, static_cast<double>(spec.dims[a] - 1)));
  }
  for (int x = first.x(); x <= last.x(); ++x)
    for (int y = first.y(); y <= last.y(); ++y)
      for (int z = first.z(); z <= last.z(); ++z) {
        const VoxelIndex i(x, y, z);
        const Vec3 c = spec.voxel_center(i);
        if ((c.array() >= lo.array()).all() && (c.array() <= hi.array()).all()) fn(i, c);
      }
}

struct Applier {
  OccupancyGrid& grid;

  void operator()(const FillBox& op) {
    const auto l = static_cast<Label>(op.label);
    for_each_voxel_in(grid.spec(), op.min, op.max, [&](const VoxelIndex& i, const Vec3&) { grid.set(i, l); });
  }
  void operator()(const FillCylinder& op) {
    const auto l = static_cast<Label>(op.label);
    const Vec3 lo(op.center.x() - op.radius, op.center.y() - op.radius, op.z_min);
    const Vec3 hi(op.center.x() + op.radius, op.center.y() + op.radius, op.z_max);
    const double r2 = op.radius * op.radius;
    for_each_voxel_in(grid.spec(), lo, hi, [&](const VoxelIndex& i, const Vec3& c) {
      const double dx = c.x() - op.center.x();
      const double dy = c.y() - op.center.y();
      if (dx * dx + dy * dy <= r2) grid.set(i, l);
    });
  }
  void operator()(const EraseRegion& op) {
    for_each_voxel_in(grid.spec(), op.min, op.max, [&](const VoxelIndex& i, const Vec3&) { grid.set(i, Label::Free); });
  }
  void operator()(const Repaint& op) {
    const auto from = static_cast<Label>(op.from_label);
    const auto to = static_cast<Label>(op.to_label);
    for_each_voxel_in(grid.spec(), op.min, op.max, [&](const VoxelIndex& i, const Vec3&) {
      if (grid.at(i) == from) grid.set(i, to);
    });
  }
  void operator()(const CopyTranslate& op) {
    const auto& spec = grid.spec();
    VoxelIndex shift;
    for (int a = 0; a < 3; ++a) shift[a] = static_cast<int>(std::lround(op.offset[a] / spec.resolution));
    const OccupancyGrid snapshot = grid;
    for_each_voxel_in(spec, op.src_min, op.src_max, [&](const VoxelIndex& i, const Vec3&) {
      const VoxelIndex dst = i + shift;
      if (spec.contains(dst)) grid.set(dst, snapshot.at(i));
    });
  }
};

}  // namespace

ScriptError::ScriptError(std::vector<Diagnostic> diagnostics)
    : ConfigError(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::vector<Diagnostic> validate_script(const EditScript& script) {
  std::vector<Diagnostic> out;
  for (std::size_t i = 0; i < script.ops.size(); ++i) std::visit(Validator{i, out}, script.ops[i]);
  return out;
}

OccupancyGrid apply_edit_script(const OccupancyGrid& grid, const EditScript& script) {
  if (auto diags = validate_script(script); !diags.empty()) throw ScriptError(std::move(diags));
  OccupancyGrid out = grid;
  for (const auto& op : script.ops) std::visit(Applier{out}, op);
  return out;
}

GridDiff diff_grids(const OccupancyGrid& a, const OccupancyGrid& b) {
  if (!(a.spec() == b.spec())) throw ConfigError("cannot diff grids with different specs");
  GridDiff d;
  const auto& la = a.labels();
  const auto& lb = b.labels();
  for (std::size_t i = 0; i < la.size(); ++i) {
    if (la[i] == lb[i]) continue;
    ++d.changed;
    ++d.removed_by_label[to_id(la[i])];
    ++d.added_by_label[to_id(lb[i])];
  }
  return d;
}

}  // namespace mpi_forge
