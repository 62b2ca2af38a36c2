#include "nsplab/grid_io.hpp"

#include <bit>
#include <fstream>
#include <stdexcept>

namespace nsplab {

static_assert(std::endian::native == std::endian::little,
              "grid files are little-endian; big-endian hosts need byte swaps");
static_assert(sizeof(Complex) == 2 * sizeof(double),
              "std::complex<double> must be two packed doubles");

namespace {

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  return tmp;
}

}  // namespace

void write_grid_file(const std::filesystem::path& path, const GridFile& g) {
  const std::uint64_t count = g.dims[0] * g.dims[1] * g.dims[2];
  if (g.data.size() != count)
    throw std::invalid_argument("write_grid_file: dims do not match payload size");
  const std::filesystem::path tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_grid_file: cannot open " + tmp.string());
    out.write(reinterpret_cast<const char*>(g.dims.data()), 3 * sizeof(std::uint64_t));
    if (count > 0)
      out.write(reinterpret_cast<const char*>(g.data.data()),
                static_cast<std::streamsize>(count * sizeof(Complex)));
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("write_grid_file: short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

GridFile read_grid_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_grid_file: cannot open " + path.string());
  GridFile g;
  in.read(reinterpret_cast<char*>(g.dims.data()), 3 * sizeof(std::uint64_t));
  if (!in) throw std::runtime_error("read_grid_file: truncated header in " + path.string());
  const std::uint64_t count = g.dims[0] * g.dims[1] * g.dims[2];
  if (count > (std::uint64_t{1} << 27))
    throw std::runtime_error("read_grid_file: implausible dims in " + path.string());
  g.data.resize(count);
  if (count > 0)
    in.read(reinterpret_cast<char*>(g.data.data()),
            static_cast<std::streamsize>(count * sizeof(Complex)));
  if (!in) throw std::runtime_error("read_grid_file: truncated payload in " + path.string());
  return g;
}

void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write_text: cannot open " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("atomic_write_text: short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace nsplab
