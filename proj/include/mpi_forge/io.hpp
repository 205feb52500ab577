// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0
//
// Byte-exact codecs for every artifact. All integers and floats are
// little-endian on disk.
//
//   OCCV1  "OCCV1\0" u32 nx ny nz, f32 origin xyz, f32 resolution,
//          nx*ny*nz u8 labels (x-major, z fastest)
//   MPIT   "MPIT\0" u32 N D H W, f32 d_min d_max, N*D*H*W u8 labels
//          (view, plane, row, column), u32 sidecar length, JSON sidecar
//   WMAP   "WMAP" u32 H W, f32 step fraction, H*W f32 weights (row-major)
//
// Palettes, rigs, plans, edit scripts and dataset indices are JSON.
// Decoders report every defect as a FormatError.

#ifndef MPI_FORGE_IO_HPP
#define MPI_FORGE_IO_HPP

#include <functional>
#include <string>
#include <string_view>

#include "mpi_forge/cbgs.hpp"
#include "mpi_forge/edit.hpp"
#include "mpi_forge/geometry.hpp"
#include "mpi_forge/mpi.hpp"
#include "mpi_forge/palette.hpp"
#include "mpi_forge/reweigh.hpp"
#include "mpi_forge/synth.hpp"

namespace mpi_forge {

/// Throws IoError.
std::string read_file(const std::string& path);
/// Throws IoError.
void write_file(const std::string& path, std::string_view bytes);

/// Widens an on-disk f32 through its shortest decimal form, so 0.2f reads
/// back as the double 0.2 and re-encodes to the same bits.
double widen_f32(float f);

std::string encode_grid(const OccupancyGrid& grid);
OccupancyGrid decode_grid(std::string_view bytes);

std::string encode_stack(const MpiStack& stack);
MpiStack decode_stack(std::string_view bytes);

std::string encode_weight_map(const WeightMap& map);
WeightMap decode_weight_map(std::string_view bytes);

std::string encode_palette(const Palette& palette);
Palette decode_palette(std::string_view text);

std::string encode_rig(const CameraRig& rig);
CameraRig decode_rig(std::string_view text);

std::string encode_plan(const SamplingPlan& plan);
SamplingPlan decode_plan(std::string_view text);

std::string encode_edit_script(const EditScript& script);
/// Structural problems (bad JSON, unknown op type, wrong value types) throw
/// FormatError; semantic ones are left to validate_script.
EditScript decode_edit_script(std::string_view text);

std::string encode_index(const DatasetIndex& index);
/// Frames without "counts" are counted by loading their grid through
/// `load_grid`, in parallel over frames.
DatasetIndex decode_index(std::string_view text,
                          const std::function<OccupancyGrid(const std::string&)>& load_grid = {},
                          int threads = 1);

/// Every key is optional and overrides the SceneRecipe default.
SceneRecipe decode_recipe(std::string_view text);

std::string encode_diff_report(const GridDiff& diff);
std::string encode_balance_report(const BalanceReport& report);

/// Binary P6.
std::string encode_ppm(const RgbImage& image);
/// Binary P5.
std::string encode_pgm(const GrayImage& image);

}  // namespace mpi_forge

#endif  // MPI_FORGE_IO_HPP
