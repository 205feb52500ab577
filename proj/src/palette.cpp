// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#include "mpi_forge/palette.hpp"

#include "mpi_forge/errors.hpp"

namespace mpi_forge {

void Palette::validate() const {
  for (int id = 0; id < kNumClasses; ++id)
    if (!entries.contains(static_cast<std::uint8_t>(id)))
      throw ConfigError("palette is missing label " + std::to_string(id));
  for (const auto& [id, entry] : entries)
    if (!is_valid_label_id(id)) throw ConfigError("palette has invalid label id " + std::to_string(id));
  if (entries.at(0).rgb != Rgb{0, 0, 0}) throw ConfigError("palette must map free to black");
}

Palette default_palette() {
  static constexpr std::array<Rgb, kNumClasses> kColors = {{
      {0, 0, 0},
      {255, 120, 50},
      {255, 192, 203},
      {255, 255, 0},
      {0, 150, 245},
      {0, 255, 255},
      {200, 180, 0},
      {255, 0, 0},
      {255, 240, 150},
      {135, 60, 0},
      {160, 32, 240},
      {255, 0, 255},
      {139, 137, 137},
      {75, 0, 75},
      {150, 240, 80},
      {230, 230, 250},
      {0, 175, 0},
  }};
  Palette p;
  for (int id = 0; id < kNumClasses; ++id)
    p.entries[static_cast<std::uint8_t>(id)] = PaletteEntry{std::string(kClassNames[id]), kColors[id]};
  p.entries[255] = PaletteEntry{"unknown", {128, 128, 128}};
  return p;
}

}  // namespace mpi_forge
