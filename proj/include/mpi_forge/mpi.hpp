// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0
//
// Semantic multi-plane image construction. Every pixel of every view is
// back-projected at D fronto-parallel depths and the occupancy label found
// there is stored, so an MPI keeps occluded geometry that a 2D semantic mask
// or depth map would discard.

#ifndef MPI_FORGE_MPI_HPP
#define MPI_FORGE_MPI_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mpi_forge/geometry.hpp"
#include "mpi_forge/palette.hpp"

namespace mpi_forge {

/// H x W image of raw label ids.
using LabelImage = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// H x W 8-bit gray image.
using GrayImage = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// H x W image of reals (meters, weights).
using RealImage = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct RgbImage {
  int width{0};
  int height{0};
  std::vector<std::uint8_t> rgb;  ///< row-major, 3 bytes per pixel

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

struct MpiConfig {
  int planes{256};
  double d_min{0.0};
  double d_max{50.0};
  int height{448};
  int width{800};

  /// Throws ConfigError unless planes >= 2, 0 <= d_min < d_max and H, W > 0.
  void validate() const;

  friend bool operator==(const MpiConfig&, const MpiConfig&) = default;
};

/// d_l = d_min + (d_max - d_min) * l / D for l in [0, D).
std::vector<double> plane_depths(const MpiConfig& config);

/// D x H x W labels of one view, plane-major.
struct LabelSlab {
  int planes{0};
  int height{0};
  int width{0};
  std::vector<Label> labels;

  [[nodiscard]] Label at(int l, int v, int u) const {
    return labels[(static_cast<std::size_t>(l) * height + v) * width + u];
  }

  friend bool operator==(const LabelSlab&, const LabelSlab&) = default;
};

/// N x D x H x W semantic MPI with the metadata needed to interpret it.
class MpiStack {
public:
  MpiStack() = default;

  /// Throws ConfigError when the label count disagrees with rig and config.
  static MpiStack create(MpiConfig config, CameraRig rig, std::optional<GridSpec> grid,
                         std::vector<Label> labels);

  [[nodiscard]] const MpiConfig& config() const noexcept { return config_; }
  [[nodiscard]] const CameraRig& rig() const noexcept { return rig_; }
  [[nodiscard]] const std::optional<GridSpec>& grid_spec() const noexcept { return grid_; }
  [[nodiscard]] const std::vector<double>& plane_depths() const noexcept { return depths_; }
  [[nodiscard]] const std::vector<Label>& labels() const noexcept { return labels_; }

  [[nodiscard]] int views() const noexcept { return static_cast<int>(rig_.size()); }
  [[nodiscard]] std::size_t view_size() const noexcept {
    return static_cast<std::size_t>(config_.planes) * config_.height * config_.width;
  }
  /// Throws ConfigError for an out-of-range view.
  [[nodiscard]] std::span<const Label> view_labels(int view) const;
  [[nodiscard]] Label at(int view, int l, int v, int u) const {
    return labels_[static_cast<std::size_t>(view) * view_size() +
                   (static_cast<std::size_t>(l) * config_.height + v) * config_.width + u];
  }

  friend bool operator==(const MpiStack&, const MpiStack&) = default;

private:
  MpiConfig config_;
  CameraRig rig_;
  std::optional<GridSpec> grid_;
  std::vector<double> depths_;
  std::vector<Label> labels_;
};

/// Native-pixel coordinate sampled by output pixel (u, v): output pixels are
/// mapped to the camera grid by uniform scaling (native_w / W, native_h / H).
inline Eigen::Vector2d native_pixel(int u, int v, const CameraModel& cam, const MpiConfig& config) {
  const double sx = static_cast<double>(cam.width()) / static_cast<double>(config.width);
  const double sy = static_cast<double>(cam.height()) / static_cast<double>(config.height);
  return {static_cast<double>(u) * sx, static_cast<double>(v) * sy};
}

/// One view's D x H x W slab: entry (l, v, u) is the label at
/// world_from_pixel(u * sx, v * sy, d_l). The grid and the camera must share
/// a frame; that cannot be checked here.
LabelSlab build_view_mpi(const OccupancyGrid& grid, const CameraModel& cam, const MpiConfig& config,
                         int threads = 1);

/// Stacks per-view slabs in rig order. Output does not depend on `threads`.
MpiStack build_rig_mpi(const OccupancyGrid& grid, const CameraRig& rig, const MpiConfig& config,
                       int threads = 1);

/// Sorted, deduplicated linear indices of every voxel some MPI sample of
/// `cam` falls in.
std::vector<std::int64_t> sampled_voxels(const GridSpec& spec, const CameraModel& cam,
                                         const MpiConfig& config);

/// Per pixel, the label of the nearest non-Free plane (Free if none).
LabelImage composite_semantic(const MpiStack& stack, int view, int threads = 1);

/// Per pixel, round-half-up of 255 * (d_first - d_min) / (d_max - d_min) for
/// the nearest non-Free plane; 255 when the ray hits nothing.
GrayImage composite_depth(const MpiStack& stack, int view, int threads = 1);

/// First-hit plane depth in meters; +infinity when the ray hits nothing.
RealImage composite_depth_meters(const MpiStack& stack, int view, int threads = 1);

/// Plane `l` of `view` as a label image.
LabelImage plane_image(const MpiStack& stack, int view, int plane);

/// Palette lookup per pixel; Free is always black. Throws ConfigError naming
/// the first label the palette lacks.
RgbImage colorize(const LabelImage& labels, const Palette& palette);

}  // namespace mpi_forge

#endif  // MPI_FORGE_MPI_HPP
