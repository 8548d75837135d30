#include <doctest.h>

#include <random>

#include "swflood/errors.hpp"
#include "swflood/state_grid.hpp"

using namespace swflood;

namespace {

RasterGrid flat(int n, double z = 0.0) { return RasterGrid::filled(n, n, 0.0, 0.0, 1.0, z); }

}  // namespace

TEST_CASE("flat DSM, dry start") {
  const State s = from_dsm(flat(10), {});
  CHECK(s.nx == 10);
  CHECK(s.ny == 10);
  CHECK(s.dx == 1.0);
  CHECK(s.volume() == 0.0);
  CHECK(s.wall.empty());
}

TEST_CASE("flat DSM, uniform depth is a lake at rest") {
  const State s = from_dsm(flat(10, 3.0), {1.0});
  for (int j = 0; j < 10; ++j) {
    for (int i = 0; i < 10; ++i) {
      CHECK(s.h(i, j) == 1.0);
      CHECK(s.z(i, j) == 3.0);
      CHECK(s.hu(i, j) == 0.0);
      CHECK(s.hv(i, j) == 0.0);
    }
  }
  CHECK(s.volume() == 100.0);
}

TEST_CASE("raster row 0 maps to the northern row of the state") {
  RasterGrid dsm = RasterGrid::filled(2, 3, 0.0, 0.0, 2.0, 0.0);
  dsm.at(0, 1) = 9.0;  // north-east
  const State s = from_dsm(dsm, {});
  CHECK(s.z(1, 2) == 9.0);
  CHECK(s.dx == 2.0);
  CHECK(to_raster(s, s.z, dsm) == dsm);
  CHECK(field_from_raster(dsm)(1, 2) == 9.0);
}

TEST_CASE("nodata holes") {
  RasterGrid dsm = flat(4, 1.0);
  dsm.at(1, 2) = dsm.nodata;
  CHECK_THROWS_AS(from_dsm(dsm, {0.5}), ConfigError);

  const State s = from_dsm(dsm, {0.5}, true);
  CHECK(s.is_wall(2, 2));
  CHECK(s.h(2, 2) == 0.0);
  CHECK(s.z(2, 2) > 1000.0);
  CHECK_FALSE(s.is_wall(1, 2));
  CHECK(to_raster(s, s.h, dsm).at(1, 2) == dsm.nodata);
}

TEST_CASE("per-cell initial depth and fill to level") {
  RasterGrid dsm = flat(3);
  dsm.at(0, 0) = 2.0;
  RasterGrid depth = flat(3, 0.25);
  depth.at(2, 2) = 0.75;
  State s = from_dsm(dsm, {0.0, &depth});
  CHECK(s.h(2, 0) == 0.75);
  CHECK(s.h(0, 0) == 0.25);

  fill_to_level(s, 1.0);
  CHECK(s.h(0, 2) == 0.0);
  CHECK(s.h(1, 1) == 1.0);

  RasterGrid bad = flat(4);
  CHECK_THROWS_AS(from_dsm(dsm, {0.0, &bad}), ConfigError);
}

TEST_CASE("velocity") {
  CHECK(velocity(2.0, 4.0, 1e-10) == 2.0);
  CHECK(velocity(0.0, 0.0, 1e-10) == 0.0);
  CHECK(velocity(1e-12, 1e-13, 1e-10) == 0.0);
}

TEST_CASE("conserved and primitive conversions are inverse on wet cells") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> hd(1e-6, 50.0);
  std::uniform_real_distribution<double> ud(-20.0, 20.0);
  for (int k = 0; k < 10000; ++k) {
    const double h = hd(rng);
    const double u = ud(rng);
    const double back = velocity(h, h * u, 1e-10);
    CHECK(std::abs(back - u) <= 1e-14 * std::max(1.0, std::abs(u)));
  }
}

TEST_CASE("field padding and strides") {
  Field2D f(3, 2, 1.5);
  CHECK(f.stride() == 3 + 2 * kGhost);
  CHECK(f.raw().size() == static_cast<std::size_t>((3 + 2 * kGhost) * (2 + 2 * kGhost)));
  f(-2, -2) = 7.0;
  f(4, 3) = 8.0;
  CHECK(f.raw().front() == 7.0);
  CHECK(f.raw().back() == 8.0);
  CHECK(f.ptr(0, 1) - f.ptr(0, 0) == f.stride());
}

TEST_CASE("parameter validation") {
  PhysicalParams p;
  CHECK_NOTHROW(p.validate());
  p.g = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.manning_n = -0.01;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.h_dry = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.cfl = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
