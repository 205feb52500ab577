// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#include "mpi_forge/stats.hpp"

#include <json.hpp>

namespace mpi_forge {

using json = nlohmann::ordered_json;

GridStats grid_stats(const OccupancyGrid& grid) {
  GridStats s;
  for (Label l : grid.labels()) ++s.label_counts[to_id(l)];
  s.voxels = grid.spec().voxel_count();
  std::int64_t occupied = 0;
  for (int id = 0; id < 256; ++id)
    if (is_occupied(static_cast<Label>(id))) occupied += s.label_counts[id];
  s.occupancy_fraction = static_cast<double>(occupied) / static_cast<double>(s.voxels);
  return s;
}

StackStats stack_stats(const MpiStack& stack) {
  const auto& c = stack.config();
  StackStats s;
  std::vector<std::int64_t> filled(static_cast<std::size_t>(c.planes), 0);
  const std::size_t plane = static_cast<std::size_t>(c.height) * c.width;
  const auto& labels = stack.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++s.label_counts[to_id(labels[i])];
    if (labels[i] != Label::Free) ++filled[(i / plane) % c.planes];
  }
  s.cells = static_cast<std::int64_t>(labels.size());
  s.fill_rate = static_cast<double>(s.cells - s.label_counts[0]) / static_cast<double>(s.cells);
  const double per_plane = static_cast<double>(plane) * stack.views();
  for (auto f : filled) s.plane_fill_rates.push_back(static_cast<double>(f) / per_plane);
  return s;
}

namespace {

json counts_json(const std::array<std::int64_t, 256>& counts) {
  json j = json::object();
  for (int id = 0; id < 256; ++id)
    if (counts[id]) j[std::string(label_name(static_cast<Label>(id)))] = counts[id];
  return j;
}

}  // namespace

std::string encode_stats(const GridStats& s) {
  return json{{"kind", "grid"},
              {"voxels", s.voxels},
              {"occupancy_fraction", s.occupancy_fraction},
              {"label_counts", counts_json(s.label_counts)}}
      .dump(2);
}

std::string encode_stats(const StackStats& s) {
  return json{{"kind", "stack"},
              {"cells", s.cells},
              {"fill_rate", s.fill_rate},
              {"plane_fill_rates", s.plane_fill_rates},
              {"label_counts", counts_json(s.label_counts)}}
      .dump(2);
}

}  // namespace mpi_forge
