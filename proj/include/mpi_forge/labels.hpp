// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#ifndef MPI_FORGE_LABELS_HPP
#define MPI_FORGE_LABELS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace mpi_forge {

/// Semantic class of one voxel. Ids 1..16 follow the nuScenes occupancy
/// benchmark column order; 0 is unoccupied space.
enum class Label : std::uint8_t {
  Free = 0,
  Barrier = 1,
  Bicycle = 2,
  Bus = 3,
  Car = 4,
  ConstructionVehicle = 5,
  Motorcycle = 6,
  Pedestrian = 7,
  TrafficCone = 8,
  Trailer = 9,
  Truck = 10,
  DriveableSurface = 11,
  OtherFlat = 12,
  Sidewalk = 13,
  Terrain = 14,
  Manmade = 15,
  Vegetation = 16,
  Unknown = 255,
};

/// Ids 0..16; Unknown sits outside this dense range.
inline constexpr int kNumClasses = 17;

constexpr std::uint8_t to_id(Label l) noexcept { return static_cast<std::uint8_t>(l); }

constexpr bool is_valid_label_id(int id) noexcept {
  return (id >= 0 && id < kNumClasses) || id == 255;
}

constexpr std::optional<Label> label_from_id(int id) noexcept {
  if (!is_valid_label_id(id)) return std::nullopt;
  return static_cast<Label>(id);
}

inline constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "free",         "barrier",    "bicycle",    "bus",
    "car",          "construction vehicle",     "motorcycle",
    "pedestrian",   "traffic cone",             "trailer",
    "truck",        "driveable surface",        "other flat",
    "sidewalk",     "terrain",    "manmade",    "vegetation",
};

constexpr std::string_view label_name(Label l) noexcept {
  const auto id = to_id(l);
  return id < kNumClasses ? kClassNames[id] : std::string_view{"unknown"};
}

/// Free and Unknown are not counted as occupied.
constexpr bool is_occupied(Label l) noexcept { return l != Label::Free && l != Label::Unknown; }

}  // namespace mpi_forge

#endif  // MPI_FORGE_LABELS_HPP
