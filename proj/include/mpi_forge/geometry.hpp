// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0
//
// Camera models, occupancy-grid storage and the pixel -> world -> voxel
// mapping shared by every other module.

#ifndef MPI_FORGE_GEOMETRY_HPP
#define MPI_FORGE_GEOMETRY_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "mpi_forge/errors.hpp"
#include "mpi_forge/labels.hpp"

namespace mpi_forge {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VoxelIndex = Eigen::Vector3i;

/// Axis-aligned voxel lattice: `dims` cells of edge `resolution` meters whose
/// minimum corner sits at `origin`.
struct GridSpec {
  VoxelIndex dims{1, 1, 1};
  Vec3 origin{Vec3::Zero()};
  double resolution{1.0};

  /// Throws ConfigError unless every dim is positive and resolution > 0.
  static GridSpec create(const VoxelIndex& dims, const Vec3& origin, double resolution);

  [[nodiscard]] std::int64_t voxel_count() const noexcept {
    return std::int64_t{dims.x()} * dims.y() * dims.z();
  }
  [[nodiscard]] Vec3 extent_max() const { return origin + dims.cast<double>() * resolution; }

  /// x-major -> y -> z linearization (z varies fastest).
  [[nodiscard]] std::int64_t linear_index(const VoxelIndex& i) const noexcept {
    return (std::int64_t{i.x()} * dims.y() + i.y()) * dims.z() + i.z();
  }
  [[nodiscard]] VoxelIndex unlinear_index(std::int64_t k) const noexcept {
    const auto z = static_cast<int>(k % dims.z());
    k /= dims.z();
    return {static_cast<int>(k / dims.y()), static_cast<int>(k % dims.y()), z};
  }
  [[nodiscard]] Vec3 voxel_center(const VoxelIndex& i) const {
    return origin + (i.cast<double>().array() + 0.5).matrix() * resolution;
  }
  [[nodiscard]] bool contains(const VoxelIndex& i) const noexcept {
    return (i.array() >= 0).all() && (i.array() < dims.array()).all();
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.dims == b.dims && a.origin == b.origin && a.resolution == b.resolution;
  }
};

/// Floor-based containment: the voxel whose half-open index interval holds
/// `p` on every axis, or nullopt outside the grid.
inline std::optional<VoxelIndex> voxel_index(const Vec3& p, const GridSpec& spec) noexcept {
  VoxelIndex out;
  for (int a = 0; a < 3; ++a) {
    const double q = std::floor((p[a] - spec.origin[a]) / spec.resolution);
    // Also rejects NaN.
    if (!(q >= 0.0 && q < static_cast<double>(spec.dims[a]))) return std::nullopt;
    out[a] = static_cast<int>(q);
  }
  return out;
}

/// Dense semantic voxel grid.
class OccupancyGrid {
public:
  OccupancyGrid() = default;
  explicit OccupancyGrid(GridSpec spec, Label fill = Label::Free);
  /// Throws ConfigError when the label count does not match the grid dimensions.
  OccupancyGrid(GridSpec spec, std::vector<Label> labels);

  [[nodiscard]] const GridSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] const std::vector<Label>& labels() const noexcept { return labels_; }
  [[nodiscard]] std::vector<Label>& labels() noexcept { return labels_; }

  [[nodiscard]] Label at(const VoxelIndex& i) const { return labels_[spec_.linear_index(i)]; }
  void set(const VoxelIndex& i, Label l) { labels_[spec_.linear_index(i)] = l; }

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

private:
  GridSpec spec_;
  std::vector<Label> labels_;
};

/// Nearest semantic index at `p`; Free outside the grid extent.
inline Label lookup_semantic(const OccupancyGrid& grid, const Vec3& p) noexcept {
  const auto idx = voxel_index(p, grid.spec());
  return idx ? grid.at(*idx) : Label::Free;
}

/// Pinhole camera. `rotation`/`translation` map camera coordinates
/// (x right, y down, z forward) into occupancy coordinates.
template <typename Scalar>
class Camera {
public:
  using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
  using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

  Camera() = default;

  /// Validates fx, fy > 0, invertible K, orthonormal proper rotation (1e-9)
  /// and positive image size. Throws ConfigError otherwise.
  static Camera create(const Matrix3& K, const Matrix3& rotation, const Vector3& translation,
                       int width, int height) {
    if (!(K(0, 0) > 0) || !(K(1, 1) > 0)) throw ConfigError("camera focal lengths must be positive");
    if (width <= 0 || height <= 0) throw ConfigError("camera image size must be positive");
    if (!K.allFinite() || !rotation.allFinite() || !translation.allFinite())
      throw ConfigError("camera parameters must be finite");
    Eigen::FullPivLU<Matrix3> lu(K);
    if (!lu.isInvertible()) throw ConfigError("camera intrinsic matrix is not invertible");
    const Scalar ortho_err = (rotation.transpose() * rotation - Matrix3::Identity()).cwiseAbs().maxCoeff();
    if (!(ortho_err <= Scalar(1e-9)) || !(rotation.determinant() > 0))
      throw ConfigError("camera rotation is not orthonormal");
    Camera c;
    c.K_ = K;
    c.K_inv_ = lu.inverse();
    c.R_ = rotation;
    c.t_ = translation;
    c.width_ = width;
    c.height_ = height;
    return c;
  }

  [[nodiscard]] const Matrix3& intrinsics() const noexcept { return K_; }
  [[nodiscard]] const Matrix3& intrinsics_inverse() const noexcept { return K_inv_; }
  [[nodiscard]] const Matrix3& rotation() const noexcept { return R_; }
  [[nodiscard]] const Vector3& translation() const noexcept { return t_; }
  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }

  [[nodiscard]] Scalar fx() const noexcept { return K_(0, 0); }
  [[nodiscard]] Scalar fy() const noexcept { return K_(1, 1); }
  [[nodiscard]] Scalar cx() const noexcept { return K_(0, 2); }
  [[nodiscard]] Scalar cy() const noexcept { return K_(1, 2); }

  friend bool operator==(const Camera& a, const Camera& b) {
    return a.K_ == b.K_ && a.R_ == b.R_ && a.t_ == b.t_ && a.width_ == b.width_ && a.height_ == b.height_;
  }

private:
  Matrix3 K_{Matrix3::Identity()};
  Matrix3 K_inv_{Matrix3::Identity()};
  Matrix3 R_{Matrix3::Identity()};
  Vector3 t_{Vector3::Zero()};
  int width_{1};
  int height_{1};
};

using CameraModel = Camera<double>;

/// Back-projects pixel (u, v) at frustum depth d: T * K^-1 * (u d, v d, d).
/// (u, v) are continuous column/row coordinates; the ray passes through the
/// coordinate value itself, with no half-pixel shift.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> world_from_pixel(Scalar u, Scalar v, Scalar d, const Camera<Scalar>& cam) {
  if (!(d >= 0)) throw ConfigError("back-projection depth must be non-negative");
  const Eigen::Matrix<Scalar, 3, 1> frustum(u * d, v * d, d);
  const Eigen::Matrix<Scalar, 3, 1> cam_point = cam.intrinsics_inverse() * frustum;
  return cam.rotation() * cam_point + cam.translation();
}

/// Returns a copy with fx and fy multiplied by `factor`; principal point and
/// resolution are kept.
CameraModel scale_intrinsics(const CameraModel& cam, double factor);

/// Ordered set of uniquely named cameras.
struct CameraRig {
  std::vector<CameraModel> cameras;
  std::vector<std::string> names;

  /// Throws ConfigError for an empty rig, size mismatch or duplicate names.
  static CameraRig create(std::vector<CameraModel> cameras, std::vector<std::string> names);

  [[nodiscard]] std::size_t size() const noexcept { return cameras.size(); }

  friend bool operator==(const CameraRig&, const CameraRig&) = default;
};

}  // namespace mpi_forge

#endif  // MPI_FORGE_GEOMETRY_HPP
