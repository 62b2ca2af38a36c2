#pragma once

// Binary grid snapshots and atomic text output.
//
// Grid file layout: three little-endian 64-bit dims (nx, ny, nz) followed
// by nx*ny*nz complex values as interleaved re/im float64, x fastest.
// Writers go through a temp file in the destination directory plus a
// rename, so readers never observe a truncated artifact.

#include "nsplab/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nsplab {

struct GridFile {
  std::array<std::uint64_t, 3> dims{0, 0, 0};
  std::vector<Complex> data;  // flat index ix + nx*(iy + ny*iz)
};

void write_grid_file(const std::filesystem::path& path, const GridFile& g);
GridFile read_grid_file(const std::filesystem::path& path);

void atomic_write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nsplab
