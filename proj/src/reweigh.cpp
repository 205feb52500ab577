// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#include "mpi_forge/reweigh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mpi_forge/parallel.hpp"

namespace mpi_forge {

double cosine_weight(double x, double m, double n) {
  if (!(n > 0)) throw ConfigError("cosine weight needs a positive horizon n");
  if (std::isnan(x)) throw ConfigError("cosine weight input is NaN");
  const double xc = std::clamp(x, 0.0, n);
  return (m - 1.0) / 2.0 * (1.0 + std::cos(xc / n * std::numbers::pi + std::numbers::pi)) + 1.0;
}

std::set<Label> ReweighConfig::default_foreground() {
  std::set<Label> s;
  for (int id = to_id(Label::Barrier); id <= to_id(Label::Truck); ++id) s.insert(static_cast<Label>(id));
  return s;
}

void ReweighConfig::validate() const {
  if (!(max_weight >= 1.0) || !std::isfinite(max_weight)) throw ConfigError("max weight m must be >= 1");
  if (total_steps < 1) throw ConfigError("total steps must be >= 1");
  if (!(max_depth > 0) || !std::isfinite(max_depth)) throw ConfigError("max depth must be positive");
  if (foreground.empty()) throw ConfigError("foreground class set is empty");
  if (foreground.contains(Label::Free)) throw ConfigError("foreground class set must not contain free");
}

double progressive_weight(double step, const ReweighConfig& config) {
  return cosine_weight(step, config.max_weight, static_cast<double>(config.total_steps));
}

double depth_weight(double depth_m, const ReweighConfig& config) {
  if (depth_m < 0) throw ConfigError("depth must be non-negative");
  return cosine_weight(std::min(depth_m, config.max_depth), config.max_weight, config.max_depth);
}

namespace {

// Lookup table over raw label ids.
std::array<bool, 256> foreground_mask(const ReweighConfig& config) {
  std::array<bool, 256> fg{};
  for (Label l : config.foreground) fg[to_id(l)] = true;
  return fg;
}

}  // namespace

WeightFactors build_weight_factors(const LabelImage& semantic, const RealImage& depth_m, double step,
                                   const ReweighConfig& config, int threads) {
  config.validate();
  if (semantic.rows() != depth_m.rows() || semantic.cols() != depth_m.cols())
    throw ConfigError("semantic and depth maps differ in size");
  const auto fg = foreground_mask(config);
  const double progressive = progressive_weight(step, config);
  WeightFactors f{RealImage::Ones(semantic.rows(), semantic.cols()), RealImage::Ones(semantic.rows(), semantic.cols())};
  parallel_for(0, semantic.rows(), threads, [&](std::int64_t v) {
    for (Eigen::Index u = 0; u < semantic.cols(); ++u) {
      if (!fg[semantic(v, u)]) continue;
      f.progressive(v, u) = progressive;
      f.depth(v, u) = depth_weight(depth_m(v, u), config);
    }
  });
  return f;
}

WeightMap build_weight_map(const LabelImage& semantic, const RealImage& depth_m, double step,
                           const ReweighConfig& config, int threads) {
  auto f = build_weight_factors(semantic, depth_m, step, config, threads);
  // Background is 1 * 1, which stays exactly 1.
  return WeightMap{f.progressive * f.depth, step / static_cast<double>(config.total_steps)};
}

WeightMap downsample_weight_map(const WeightMap& map, int factor) {
  if (factor < 1) throw ConfigError("downsample factor must be >= 1");
  const auto h = map.values.rows();
  const auto w = map.values.cols();
  if (h % factor != 0 || w % factor != 0) throw ConfigError("downsample factor must divide the map size");
  RealImage out(h / factor, w / factor);
  for (Eigen::Index v = 0; v < out.rows(); ++v)
    for (Eigen::Index u = 0; u < out.cols(); ++u)
      out(v, u) = map.values.block(v * factor, u * factor, factor, factor).mean();
  return WeightMap{std::move(out), map.step_fraction};
}

}  // namespace mpi_forge
