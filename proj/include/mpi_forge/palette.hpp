// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#ifndef MPI_FORGE_PALETTE_HPP
#define MPI_FORGE_PALETTE_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include "mpi_forge/labels.hpp"

namespace mpi_forge {

using Rgb = std::array<std::uint8_t, 3>;

struct PaletteEntry {
  std::string name;
  Rgb rgb{0, 0, 0};

  friend bool operator==(const PaletteEntry&, const PaletteEntry&) = default;
};

/// Display colors per label id. A valid palette covers ids 0..16 and maps
/// Free to black; Unknown (255) is optional.
struct Palette {
  std::map<std::uint8_t, PaletteEntry> entries;

  /// Throws ConfigError when the coverage or Free-is-black rule is broken.
  void validate() const;

  friend bool operator==(const Palette&, const Palette&) = default;
};

/// The colors commonly used to visualize nuScenes occupancy labels.
Palette default_palette();

}  // namespace mpi_forge

#endif  // MPI_FORGE_PALETTE_HPP
