// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0
//
// Foreground loss reweighing. One inverted-cosine ramp from 1 to m drives
// both the training-progress factor and the per-pixel depth factor; their
// product is the weight applied to the denoising loss.

#ifndef MPI_FORGE_REWEIGH_HPP
#define MPI_FORGE_REWEIGH_HPP

#include <cstdint>
#include <set>

#include "mpi_forge/labels.hpp"
#include "mpi_forge/mpi.hpp"

namespace mpi_forge {

/// w(x, m, n) = (m - 1) / 2 * (1 + cos(x / n * pi + pi)) + 1, with x clamped
/// to [0, n]. Throws ConfigError when n <= 0.
double cosine_weight(double x, double m, double n);

struct ReweighConfig {
  double max_weight{2.0};       ///< m
  std::int64_t total_steps{1};  ///< n for the progressive factor
  double max_depth{50.0};       ///< n for the depth factor, meters
  std::set<Label> foreground{default_foreground()};

  /// barrier .. truck, the ten object classes.
  static std::set<Label> default_foreground();

  /// Throws ConfigError unless m >= 1, total_steps >= 1, max_depth > 0 and
  /// the foreground set is nonempty without Free.
  void validate() const;
};

double progressive_weight(double step, const ReweighConfig& config);
double depth_weight(double depth_m, const ReweighConfig& config);

struct WeightMap {
  RealImage values;
  double step_fraction{0.0};  ///< step / total_steps the map was built for
};

struct WeightFactors {
  RealImage progressive;
  RealImage depth;
};

/// The two factors separately; background pixels are 1 in both.
WeightFactors build_weight_factors(const LabelImage& semantic, const RealImage& depth_m, double step,
                                   const ReweighConfig& config, int threads = 1);

/// Foreground pixels get progressive_weight(step) * depth_weight(depth),
/// background pixels exactly 1. Throws ConfigError on a shape mismatch.
WeightMap build_weight_map(const LabelImage& semantic, const RealImage& depth_m, double step,
                           const ReweighConfig& config, int threads = 1);

/// Block-mean pooling by an integer factor that divides H and W.
WeightMap downsample_weight_map(const WeightMap& map, int factor);

}  // namespace mpi_forge

#endif  // MPI_FORGE_REWEIGH_HPP
