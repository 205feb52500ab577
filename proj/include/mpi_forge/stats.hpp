// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#ifndef MPI_FORGE_STATS_HPP
#define MPI_FORGE_STATS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mpi_forge/geometry.hpp"
#include "mpi_forge/mpi.hpp"

namespace mpi_forge {

struct GridStats {
  std::array<std::int64_t, 256> label_counts{};
  std::int64_t voxels{0};
  double occupancy_fraction{0.0};  ///< voxels that are neither free nor unknown
};

struct StackStats {
  std::array<std::int64_t, 256> label_counts{};
  std::int64_t cells{0};
  double fill_rate{0.0};                 ///< non-free cells over all cells
  std::vector<double> plane_fill_rates;  ///< per plane, over all views
};

GridStats grid_stats(const OccupancyGrid& grid);
StackStats stack_stats(const MpiStack& stack);

std::string encode_stats(const GridStats& stats);
std::string encode_stats(const StackStats& stats);

}  // namespace mpi_forge

#endif  // MPI_FORGE_STATS_HPP
