// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0
//
// Class-balanced grouping and sampling over occupancy frames. Each class
// forms a group of the frames that contain it; every group receives an equal
// share of the plan, so rare classes are seen as often as frequent ones.

#ifndef MPI_FORGE_CBGS_HPP
#define MPI_FORGE_CBGS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mpi_forge/geometry.hpp"

namespace mpi_forge {

using ClassCounts = std::array<std::int64_t, kNumClasses>;

struct FrameRecord {
  std::string id;
  std::string grid_path;
  ClassCounts voxel_counts{};  ///< index 0 (free) is ignored

  /// Presence bitset, derived from the counts.
  [[nodiscard]] bool contains(int class_id) const { return class_id > 0 && voxel_counts[class_id] > 0; }
};

/// Counts occupied classes 1..16 of one grid.
FrameRecord make_frame_record(std::string id, std::string grid_path, const OccupancyGrid& grid);

struct DatasetIndex {
  std::vector<FrameRecord> frames;

  /// Throws ConfigError on duplicate ids or negative counts.
  void validate() const;
};

/// Number of frames containing each class (index 0 is always 0).
ClassCounts class_histogram(const DatasetIndex& index);

enum class GroupWeighting {
  Presence,    ///< every frame of a group is equally likely
  VoxelCount,  ///< frames are apportioned by their voxel count of the class
};

struct SamplingPlan {
  std::uint64_t seed{0};
  std::vector<std::string> entries;

  friend bool operator==(const SamplingPlan&, const SamplingPlan&) = default;
};

/// Splits `target_len` evenly over the classes present in the dataset and
/// fills each class group's share with whole copies of the group plus a
/// seeded draw for the remainder. Frames not drawn at all are appended once
/// and the plan is shuffled. Deterministic in (index, target_len, seed).
/// Throws ConfigError for an empty dataset.
SamplingPlan build_sampling_plan(const DatasetIndex& index, std::size_t target_len, std::uint64_t seed,
                                 GroupWeighting weighting = GroupWeighting::Presence);

struct BalanceReport {
  ClassCounts exposure_before{};  ///< each frame counted once
  ClassCounts exposure_after{};   ///< counted per plan entry
  std::array<double, kNumClasses> frequency_before{};
  std::array<double, kNumClasses> frequency_after{};
  double ratio_before{1.0};  ///< max / min exposure over present classes
  double ratio_after{1.0};
};

/// Throws ConfigError for an empty plan or ids missing from the index.
BalanceReport balance_report(const SamplingPlan& plan, const DatasetIndex& index);

}  // namespace mpi_forge

#endif  // MPI_FORGE_CBGS_HPP
