#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "swflood/raster_io.hpp"

namespace swflood {

/// Grid edges; north is the first raster row, west the first raster column.
enum class Edge { North = 0, South = 1, East = 2, West = 3 };

/// Ghost layers on every side; the MUSCL + hydrostatic stencil reads two cells out.
inline constexpr int kGhost = 2;

/// Physical and numerical constants shared by every kernel.
struct PhysicalParams {
  double g = 9.81;
  double manning_n = 0.0;  ///< s m^-1/3, spatially uniform
  double h_dry = 1e-10;    ///< below this depth velocities and friction are switched off
  double cfl = 0.5;

  /// Throws ConfigError on g <= 0, n < 0, h_dry <= 0 or cfl <= 0.
  void validate() const;
};

/// Cell-centred scalar field with kGhost layers of padding. Indices run from -kGhost to
/// n + kGhost - 1; (0, 0) is the south-west interior cell, j grows northward.
class Field2D {
 public:
  Field2D() = default;
  Field2D(int nx, int ny, double value = 0.0)
      : nx_(nx), ny_(ny), stride_(nx + 2 * kGhost),
        data_(static_cast<std::size_t>(nx + 2 * kGhost) * static_cast<std::size_t>(ny + 2 * kGhost), value) {}

  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  /// Distance in memory between (i, j) and (i, j + 1).
  std::ptrdiff_t stride() const noexcept { return stride_; }
  double* ptr(int i, int j) { return data_.data() + index(i, j); }
  const double* ptr(int i, int j) const { return data_.data() + index(i, j); }
  std::span<double> raw() noexcept { return data_; }
  std::span<const double> raw() const noexcept { return data_; }

  friend bool operator==(const Field2D&, const Field2D&) = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j + kGhost) * static_cast<std::size_t>(stride_) +
           static_cast<std::size_t>(i + kGhost);
  }

  int nx_ = 0;
  int ny_ = 0;
  int stride_ = 0;
  std::vector<double> data_;
};

/// Conserved variables (h, hu, hv) and fixed topography z on a ghost-padded grid.
struct State {
  int nx = 0;
  int ny = 0;
  double dx = 1.0;
  double dy = 1.0;
  Field2D h;
  Field2D hu;
  Field2D hv;
  Field2D z;
  /// Interior cells turned into internal walls (raised topography, never wetted).
  std::vector<std::uint8_t> wall;

  State() = default;
  State(int nx, int ny, double dx, double dy);

  bool is_wall(int i, int j) const { return !wall.empty() && wall[static_cast<std::size_t>(j) * nx + i] != 0; }

  /// Total water volume, summed row by row from the south-west cell.
  double volume() const;
};

/// Unit conversion helper: u = hu / h on wet cells, 0 otherwise.
inline double velocity(double h, double hu, double h_dry) { return h > h_dry ? hu / h : 0.0; }

struct InitialDepth {
  double uniform = 0.0;
  const RasterGrid* per_cell = nullptr;  ///< same geometry as the DSM when set
};

/// Builds a state from a surface model. Nodata cells become internal walls when
/// `nodata_as_wall` is set and are a ConfigError otherwise. Velocities start at zero.
State from_dsm(const RasterGrid& dsm, const InitialDepth& initial, bool nodata_as_wall = false);

/// Sets h = max(level - z, 0) on every non-wall cell and zeroes the momenta.
void fill_to_level(State& state, double level);

/// Copies the interior of a field into a raster laid out like `like` (walls become nodata).
RasterGrid to_raster(const State& state, const Field2D& field, const RasterGrid& like);

/// Inverse of to_raster for a per-cell field (e.g. an initial depth map).
Field2D field_from_raster(const RasterGrid& raster);

}  // namespace swflood
