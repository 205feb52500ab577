// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#include "mpi_forge/mpi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpi_forge/parallel.hpp"

namespace mpi_forge {

void MpiConfig::validate() const {
  if (planes < 2) throw ConfigError("MPI needs at least 2 planes");
  if (!std::isfinite(d_min) || !std::isfinite(d_max) || !(d_min >= 0.0) || !(d_min < d_max))
    throw ConfigError("MPI depth range must satisfy 0 <= d_min < d_max");
  if (height <= 0 || width <= 0) throw ConfigError("MPI resolution must be positive");
}

std::vector<double> plane_depths(const MpiConfig& config) {
  config.validate();
  std::vector<double> d(static_cast<std::size_t>(config.planes));
  for (int l = 0; l < config.planes; ++l)
    d[l] = config.d_min + (config.d_max - config.d_min) * static_cast<double>(l) / static_cast<double>(config.planes);
  return d;
}

MpiStack MpiStack::create(MpiConfig config, CameraRig rig, std::optional<GridSpec> grid, std::vector<Label> labels) {
  config.validate();
  if (rig.size() == 0) throw ConfigError("MPI stack needs at least one view");
  MpiStack s;
  s.config_ = config;
  s.rig_ = std::move(rig);
  s.grid_ = std::move(grid);
  s.depths_ = mpi_forge::plane_depths(config);
  if (labels.size() != s.view_size() * s.rig_.size()) throw ConfigError("MPI label count does not match N x D x H x W");
  s.labels_ = std::move(labels);
  return s;
}

std::span<const Label> MpiStack::view_labels(int view) const {
  if (view < 0 || view >= views()) throw ConfigError("view index " + std::to_string(view) + " out of range");
  return std::span<const Label>(labels_).subspan(static_cast<std::size_t>(view) * view_size(), view_size());
}

namespace {

// Fills one H x W plane; shared by the per-view and rig builders so both
// produce identical samples.
void fill_plane(const OccupancyGrid& grid, const CameraModel& cam, const MpiConfig& config, double depth,
                Label* out) {
  for (int v = 0; v < config.height; ++v) {
    for (int u = 0; u < config.width; ++u) {
      const Eigen::Vector2d px = native_pixel(u, v, cam, config);
      *out++ = lookup_semantic(grid, world_from_pixel(px.x(), px.y(), depth, cam));
    }
  }
}

void check_view(const MpiStack& stack, int view) {
  if (view < 0 || view >= stack.views()) throw ConfigError("view index " + std::to_string(view) + " out of range");
}

// Index of the nearest non-Free plane at pixel (v, u), or -1.
int first_hit(const MpiStack& stack, int view, int v, int u) {
  for (int l = 0; l < stack.config().planes; ++l)
    if (stack.at(view, l, v, u) != Label::Free) return l;
  return -1;
}

}  // namespace

LabelSlab build_view_mpi(const OccupancyGrid& grid, const CameraModel& cam, const MpiConfig& config, int threads) {
  const auto depths = plane_depths(config);
  LabelSlab slab{config.planes, config.height, config.width, {}};
  const std::size_t plane_size = static_cast<std::size_t>(config.height) * config.width;
  slab.labels.resize(plane_size * config.planes);
  parallel_for(0, config.planes, threads, [&](std::int64_t l) {
    fill_plane(grid, cam, config, depths[l], slab.labels.data() + l * plane_size);
  });
  return slab;
}

MpiStack build_rig_mpi(const OccupancyGrid& grid, const CameraRig& rig, const MpiConfig& config, int threads) {
  const auto depths = plane_depths(config);
  const std::size_t plane_size = static_cast<std::size_t>(config.height) * config.width;
  const std::int64_t planes = config.planes;
  std::vector<Label> labels(plane_size * planes * rig.size());
  parallel_for(0, planes * static_cast<std::int64_t>(rig.size()), threads, [&](std::int64_t k) {
    const auto view = static_cast<std::size_t>(k / planes);
    fill_plane(grid, rig.cameras[view], config, depths[k % planes], labels.data() + k * plane_size);
  });
  return MpiStack::create(config, rig, grid.spec(), std::move(labels));
}

std::vector<std::int64_t> sampled_voxels(const GridSpec& spec, const CameraModel& cam, const MpiConfig& config) {
  const auto depths = plane_depths(config);
  std::vector<std::int64_t> hits;
  for (double d : depths) {
    for (int v = 0; v < config.height; ++v) {
      for (int u = 0; u < config.width; ++u) {
        const Eigen::Vector2d px = native_pixel(u, v, cam, config);
        if (auto idx = voxel_index(world_from_pixel(px.x(), px.y(), d, cam), spec)) hits.push_back(spec.linear_index(*idx));
      }
    }
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  return hits;
}

LabelImage composite_semantic(const MpiStack& stack, int view, int threads) {
  check_view(stack, view);
  const auto& c = stack.config();
  LabelImage out(c.height, c.width);
  parallel_for(0, c.height, threads, [&](std::int64_t v) {
    for (int u = 0; u < c.width; ++u) {
      const int l = first_hit(stack, view, static_cast<int>(v), u);
      out(v, u) = l < 0 ? to_id(Label::Free) : to_id(stack.at(view, l, static_cast<int>(v), u));
    }
  });
  return out;
}

GrayImage composite_depth(const MpiStack& stack, int view, int threads) {
  check_view(stack, view);
  const auto& c = stack.config();
  const std::int64_t planes = c.planes;
  GrayImage out(c.height, c.width);
  parallel_for(0, c.height, threads, [&](std::int64_t v) {
    for (int u = 0; u < c.width; ++u) {
      const int l = first_hit(stack, view, static_cast<int>(v), u);
      // (d_l - d_min) / (d_max - d_min) is exactly l / D; rounding it in
      // integers keeps half-way cases exact for any depth range.
      out(v, u) = l < 0 ? 255 : static_cast<std::uint8_t>((510 * std::int64_t{l} + planes) / (2 * planes));
    }
  });
  return out;
}

RealImage composite_depth_meters(const MpiStack& stack, int view, int threads) {
  check_view(stack, view);
  const auto& c = stack.config();
  const auto& depths = stack.plane_depths();
  RealImage out(c.height, c.width);
  parallel_for(0, c.height, threads, [&](std::int64_t v) {
    for (int u = 0; u < c.width; ++u) {
      const int l = first_hit(stack, view, static_cast<int>(v), u);
      out(v, u) = l < 0 ? std::numeric_limits<double>::infinity() : depths[l];
    }
  });
  return out;
}

LabelImage plane_image(const MpiStack& stack, int view, int plane) {
  check_view(stack, view);
  const auto& c = stack.config();
  if (plane < 0 || plane >= c.planes) throw ConfigError("plane index " + std::to_string(plane) + " out of range");
  LabelImage out(c.height, c.width);
  for (int v = 0; v < c.height; ++v)
    for (int u = 0; u < c.width; ++u) out(v, u) = to_id(stack.at(view, plane, v, u));
  return out;
}

RgbImage colorize(const LabelImage& labels, const Palette& palette) {
  RgbImage img{static_cast<int>(labels.cols()), static_cast<int>(labels.rows()), {}};
  img.rgb.reserve(static_cast<std::size_t>(labels.size()) * 3);
  for (Eigen::Index v = 0; v < labels.rows(); ++v) {
    for (Eigen::Index u = 0; u < labels.cols(); ++u) {
      const std::uint8_t id = labels(v, u);
      Rgb rgb{0, 0, 0};
      if (id != to_id(Label::Free)) {
        const auto it = palette.entries.find(id);
        if (it == palette.entries.end()) throw ConfigError("palette has no color for label " + std::to_string(id));
        rgb = it->second.rgb;
      }
      img.rgb.insert(img.rgb.end(), rgb.begin(), rgb.end());
    }
  }
  return img;
}

}  // namespace mpi_forge
