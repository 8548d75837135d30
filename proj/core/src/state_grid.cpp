#include "swflood/state_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "swflood/errors.hpp"

namespace swflood {

void PhysicalParams::validate() const {
  if (!(g > 0.0)) throw ConfigError("g must be > 0");
  if (!(manning_n >= 0.0)) throw ConfigError("manning_n must be >= 0");
  if (!(h_dry > 0.0)) throw ConfigError("h_dry must be > 0");
  // cfl > 1 is accepted; it violates the stability bound and is reported by the caller.
  if (!(cfl > 0.0) || !std::isfinite(cfl)) throw ConfigError("cfl must be > 0");
}

State::State(int nx_, int ny_, double dx_, double dy_)
    : nx(nx_), ny(ny_), dx(dx_), dy(dy_), h(nx_, ny_), hu(nx_, ny_), hv(nx_, ny_), z(nx_, ny_) {}

double State::volume() const {
  double total = 0.0;
  for (int j = 0; j < ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < nx; ++i) row += h(i, j);
    total += row;
  }
  return total * dx * dy;
}

State from_dsm(const RasterGrid& dsm, const InitialDepth& initial, bool nodata_as_wall) {
  dsm.validate();
  if (initial.per_cell && !initial.per_cell->same_geometry(dsm)) {
    throw ConfigError("initial depth raster does not match the DSM geometry");
  }
  if (!(initial.uniform >= 0.0)) throw ConfigError("initial depth must be >= 0");

  const int nx = static_cast<int>(dsm.ncols);
  const int ny = static_cast<int>(dsm.nrows);
  State s(nx, ny, dsm.cellsize, dsm.cellsize);
  s.wall.assign(static_cast<std::size_t>(nx) * ny, 0);

  double z_top = -std::numeric_limits<double>::infinity();
  bool any_wall = false;
  for (std::size_t r = 0; r < dsm.nrows; ++r) {
    for (std::size_t c = 0; c < dsm.ncols; ++c) {
      if (dsm.is_nodata(r, c)) {
        if (!nodata_as_wall) {
          throw ConfigError("DSM has nodata at row " + std::to_string(r) + ", col " + std::to_string(c) +
                            " and nodata walls are disabled");
        }
        any_wall = true;
      } else {
        z_top = std::max(z_top, dsm.at(r, c));
      }
    }
  }
  if (!std::isfinite(z_top)) throw ConfigError("DSM holds no valid cells");
  // Wall cells sit far above any water surface the run can produce.
  const double wall_z = z_top + 1.0e4;

  for (int j = 0; j < ny; ++j) {
    const std::size_t r = dsm.nrows - 1 - static_cast<std::size_t>(j);
    for (int i = 0; i < nx; ++i) {
      const auto c = static_cast<std::size_t>(i);
      if (dsm.is_nodata(r, c)) {
        s.wall[static_cast<std::size_t>(j) * nx + i] = 1;
        s.z(i, j) = wall_z;
        continue;
      }
      s.z(i, j) = dsm.at(r, c);
      double h0 = initial.uniform;
      if (initial.per_cell) {
        h0 = initial.per_cell->is_nodata(r, c) ? 0.0 : initial.per_cell->at(r, c);
        if (!(h0 >= 0.0)) throw ConfigError("initial depth raster has a negative value");
      }
      s.h(i, j) = h0;
    }
  }
  if (!any_wall) s.wall.clear();
  return s;
}

void fill_to_level(State& state, double level) {
  for (int j = 0; j < state.ny; ++j) {
    for (int i = 0; i < state.nx; ++i) {
      state.h(i, j) = state.is_wall(i, j) ? 0.0 : std::max(level - state.z(i, j), 0.0);
      state.hu(i, j) = 0.0;
      state.hv(i, j) = 0.0;
    }
  }
}

RasterGrid to_raster(const State& state, const Field2D& field, const RasterGrid& like) {
  if (like.ncols != static_cast<std::size_t>(state.nx) || like.nrows != static_cast<std::size_t>(state.ny)) {
    throw DimensionError("raster template does not match the state dimensions");
  }
  RasterGrid out = like;
  out.values.assign(like.size(), 0.0);
  for (int j = 0; j < state.ny; ++j) {
    const std::size_t r = like.nrows - 1 - static_cast<std::size_t>(j);
    for (int i = 0; i < state.nx; ++i) {
      out.at(r, static_cast<std::size_t>(i)) = state.is_wall(i, j) ? like.nodata : field(i, j);
    }
  }
  return out;
}

Field2D field_from_raster(const RasterGrid& raster) {
  Field2D f(static_cast<int>(raster.ncols), static_cast<int>(raster.nrows));
  for (int j = 0; j < f.ny(); ++j) {
    const std::size_t r = raster.nrows - 1 - static_cast<std::size_t>(j);
    for (int i = 0; i < f.nx(); ++i) f(i, j) = raster.at(r, static_cast<std::size_t>(i));
  }
  return f;
}

}  // namespace swflood
