#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace swflood {

/// Georeferenced square-cell raster. Row 0 is the northernmost row.
struct RasterGrid {
  std::size_t ncols = 0;
  std::size_t nrows = 0;
  double xll = 0.0;  ///< lower-left corner x
  double yll = 0.0;  ///< lower-left corner y
  double cellsize = 1.0;
  double nodata = -9999.0;
  std::vector<double> values;  ///< row-major, ncols * nrows

  static RasterGrid filled(std::size_t ncols, std::size_t nrows, double xll, double yll,
                           double cellsize, double value, double nodata = -9999.0);

  double& at(std::size_t row, std::size_t col) { return values[row * ncols + col]; }
  double at(std::size_t row, std::size_t col) const { return values[row * ncols + col]; }
  bool is_nodata(std::size_t row, std::size_t col) const { return at(row, col) == nodata; }
  std::size_t size() const noexcept { return ncols * nrows; }

  /// Throws DimensionError / Error when an invariant is broken.
  void validate() const;

  bool same_geometry(const RasterGrid& other) const;

  friend bool operator==(const RasterGrid&, const RasterGrid&) = default;
};

RasterGrid read_ascii_grid(std::istream& in);
RasterGrid read_ascii_grid_file(const std::filesystem::path& path);

/// Values are printed with `precision` significant digits; nodata is printed verbatim.
void write_ascii_grid(std::ostream& out, const RasterGrid& grid, int precision = 10);
void write_ascii_grid_file(const std::filesystem::path& path, const RasterGrid& grid,
                           int precision = 10);

}  // namespace swflood
