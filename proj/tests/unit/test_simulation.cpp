#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "swflood/errors.hpp"
#include "swflood/simulation.hpp"

using namespace swflood;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("swflood_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// 16 x 10 valley sloping east with a west inflow.
Scenario valley(double duration, double snapshot_interval = 0.0) {
  Scenario s;
  s.dsm = RasterGrid::filled(16, 10, 0.0, 0.0, 2.0, 0.0);
  for (int r = 0; r < 10; ++r) {
    for (int c = 0; c < 16; ++c) s.dsm.at(r, c) = 1.0 - 0.002 * c + 0.05 * std::abs(r - 4.5);
  }
  s.boundaries[Edge::West].kind = boundary::BoundaryKind::Discharge;
  s.boundaries[Edge::West].mask = {4, 5};
  s.boundaries[Edge::East].kind = boundary::BoundaryKind::FreeOutflow;
  s.params.manning_n = 0.03;
  s.initial_depth = 0.3;
  s.spin_up = {0.5, duration / 3};
  s.hydrograph.knots = {{0.0, 0.5}, {duration / 3, 1.5}, {2 * duration / 3, 0.5}};
  s.total_duration = duration;
  s.snapshot_interval = snapshot_interval > 0 ? snapshot_interval : duration;
  return s;
}

Scenario closed_basin(std::uint64_t seed) {
  Scenario s;
  s.dsm = RasterGrid::filled(12, 12, 0.0, 0.0, 1.0, 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, 0.5);
  RasterGrid depth = s.dsm;
  for (int r = 0; r < 12; ++r) {
    for (int c = 0; c < 12; ++c) {
      s.dsm.at(r, c) = d(rng);
      depth.at(r, c) = 0.2 + d(rng);
    }
  }
  s.initial_depth_map = depth;
  s.total_duration = 5.0;
  s.snapshot_interval = 5.0;
  return s;
}

}  // namespace

TEST_CASE("hydrograph interpolation") {
  Hydrograph hg{{{0.0, 1500.0}, {10800.0, 3700.0}, {21600.0, 1500.0}}};
  CHECK(interpolate_q(hg, 5400.0) == doctest::Approx(2600.0));
  CHECK(interpolate_q(hg, 10800.0) == 3700.0);
  CHECK(interpolate_q(hg, -5.0) == 1500.0);
  CHECK(interpolate_q(hg, 1e9) == 1500.0);
  CHECK(interpolate_q(hg, 16200.0) == doctest::Approx(2600.0));
  CHECK(interpolate_q(Hydrograph{{{3.0, 7.0}}}, 100.0) == 7.0);
}

TEST_CASE("hydrograph parsing") {
  std::istringstream ok("# t Q\n0 10\n\n60 20 # peak\n120 10\n");
  const Hydrograph hg = parse_hydrograph(ok);
  REQUIRE(hg.knots.size() == 3);
  CHECK(hg.knots[1] == std::pair{60.0, 20.0});

  std::istringstream bad_token("0 1\n5 x\n");
  try {
    parse_hydrograph(bad_token);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream unordered("0 1\n10 2\n5 3\n");
  CHECK_THROWS_AS(parse_hydrograph(unordered), ParseError);
  std::istringstream negative("0 -1\n");
  CHECK_THROWS_AS(parse_hydrograph(negative), ParseError);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(parse_hydrograph(empty), ParseError);
}

TEST_CASE("scenario discharge switches from spin-up to the hydrograph") {
  Scenario s = valley(30.0);
  CHECK(scenario_discharge(s, 0.0) == 0.5);
  CHECK(scenario_discharge(s, 9.99) == 0.5);
  CHECK(scenario_discharge(s, 10.0) == 0.5);
  CHECK(scenario_discharge(s, 15.0) == doctest::Approx(1.0));
  CHECK(scenario_discharge(s, 20.0) == doctest::Approx(1.5));
}

TEST_CASE("scenario validation") {
  Scenario s = valley(30.0);
  CHECK_NOTHROW(s.validate());
  s.total_duration = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = valley(30.0);
  s.spin_up.duration = 40.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = valley(30.0);
  s.hydrograph.knots.clear();
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("mass balance closure") {
  MassBalance m{10.0, 12.0, 5.0, 3.0};
  CHECK(m.imbalance() == 0.0);
  CHECK(m.relative_closure() == 0.0);
  m.final_storage = 12.5;
  CHECK(m.relative_closure() == doctest::Approx(0.05));
  MassBalance zero;
  CHECK(zero.relative_closure() == 0.0);
}

TEST_CASE("no inflow on a dry valley gives zero maxima") {
  Scenario s = valley(5.0);
  s.initial_depth = 0.0;
  s.spin_up.q_const = 0.0;
  s.hydrograph.knots = {{0.0, 0.0}};
  const RunResult r = run(s);
  for (int j = 0; j < 10; ++j) {
    for (int i = 0; i < 16; ++i) {
      CHECK(r.maxima.max_h(i, j) == 0.0);
      CHECK(r.maxima.max_speed(i, j) == 0.0);
    }
  }
  CHECK(r.mass.inflow == 0.0);
  CHECK(r.mass.final_storage == 0.0);
}

TEST_CASE("closed basin keeps its storage") {
  const RunResult r = run(closed_basin(21));
  CHECK(r.mass.inflow == 0.0);
  CHECK(r.mass.outflow == 0.0);
  CHECK(std::abs(r.mass.final_storage - r.mass.initial_storage) <= 1e-10 * r.mass.initial_storage);
  CHECK(r.end_time == 5.0);
}

TEST_CASE("inflow run closes the mass balance and ends on time") {
  const RunResult r = run(valley(30.0));
  CHECK(r.end_time == 30.0);
  CHECK(r.mass.inflow > 0.0);
  CHECK(r.mass.relative_closure() <= 1e-10);
  CHECK(r.critical_fallbacks == 0);
}

TEST_CASE("maxima only grow") {
  Simulation sim(valley(20.0));
  Field2D prev = sim.maxima().max_h;
  while (sim.time() < 20.0) {
    sim.advance_to(std::min(20.0, sim.time() + 1.0));
    const Field2D& cur = sim.maxima().max_h;
    for (int j = 0; j < 10; ++j) {
      for (int i = 0; i < 16; ++i) {
        CHECK(cur(i, j) >= prev(i, j));
        CHECK(cur(i, j) >= sim.solver().state().h(i, j));
      }
    }
    prev = cur;
  }
}

TEST_CASE("restart from a checkpoint reproduces the straight run") {
  const fs::path dir = fresh_dir("restart");
  // The checkpoint sits on a snapshot time, which both runs step onto exactly.
  const Scenario scn = valley(20.0, 10.0);

  Simulation straight(scn);
  straight.advance_to(20.0);

  Simulation first(scn);
  first.advance_to(10.0);
  CHECK(first.time() == 10.0);
  first.write_checkpoint(dir / "mid.ckpt");

  Simulation second(scn);
  second.read_checkpoint(dir / "mid.ckpt");
  CHECK(second.time() == 10.0);
  CHECK(second.steps() == first.steps());
  second.advance_to(20.0);

  const State a = straight.solver().state();
  const State b = second.solver().state();
  CHECK(second.steps() == straight.steps());
  CHECK(b.h == a.h);
  CHECK(b.hu == a.hu);
  CHECK(b.hv == a.hv);
  CHECK(second.maxima().max_h == straight.maxima().max_h);
  CHECK(std::abs(second.mass_balance().inflow - straight.mass_balance().inflow) <= 1e-12);
}

TEST_CASE("checkpoint mismatches are rejected") {
  const fs::path dir = fresh_dir("ckpt_mismatch");
  Simulation sim(valley(10.0));
  sim.advance_to(2.0);
  sim.write_checkpoint(dir / "a.ckpt");

  Scenario other = valley(10.0);
  other.params.manning_n = 0.05;
  Simulation wrong_params(other);
  CHECK_THROWS_AS(wrong_params.read_checkpoint(dir / "a.ckpt"), ConfigError);

  Simulation wrong_size(closed_basin(1));
  CHECK_THROWS_AS(wrong_size.read_checkpoint(dir / "a.ckpt"), ConfigError);

  std::ofstream(dir / "junk.ckpt") << "not a checkpoint";
  CHECK_THROWS_AS(sim.read_checkpoint(dir / "junk.ckpt"), ConfigError);
  CHECK_THROWS_AS(sim.read_checkpoint(dir / "missing.ckpt"), ConfigError);
}

TEST_CASE("snapshots are written at the requested times") {
  const fs::path dir = fresh_dir("snapshots");
  Scenario s = valley(12.0, 4.0);
  s.output_dir = dir;
  const RunResult r = run(s);
  CHECK(r.snapshots.size() == 12);  // h, u, v at 0, 4, 8, 12 s
  for (const char* f : {"h_000000.asc", "h_000004.asc", "h_000008.asc", "h_000012.asc", "u_000012.asc",
                        "v_000012.asc", "max_h.asc", "max_speed.asc", "time_of_max_h.asc"}) {
    CAPTURE(f);
    CHECK(fs::exists(dir / f));
  }
  const RasterGrid h = read_ascii_grid_file(dir / "h_000012.asc");
  CHECK(h.ncols == 16);
  CHECK(h.nrows == 10);
}

TEST_CASE("steady state monitor") {
  Field2D a(2, 2, 1.0);
  Field2D b(2, 2, 1.0);
  b(1, 1) = 1.1;
  Field2D c = b;
  const std::vector<Field2D> hist{a, b, c};
  const auto change = steady_state_monitor(hist);
  REQUIRE(change.size() == 2);
  CHECK(change[0] == doctest::Approx(0.1 / 1.1));
  CHECK(change[1] == 0.0);
  const std::vector<Field2D> dry{Field2D(2, 2), Field2D(2, 2)};
  CHECK(steady_state_monitor(dry)[0] == 0.0);
}

TEST_CASE("parameter hash") {
  PhysicalParams p;
  const auto h0 = params_hash(p);
  CHECK(params_hash(p) == h0);
  p.manning_n = 0.03;
  CHECK(params_hash(p) != h0);
}

TEST_CASE("scenario config files") {
  const fs::path dir = fresh_dir("config");
  std::ofstream(dir / "dsm.asc") << "ncols 4\nnrows 3\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n"
                                    "1 1 1 1\n0 0 0 0\n1 1 1 1\n";
  std::ofstream(dir / "mask.txt") << "1 0\n";
  std::ofstream(dir / "hydro.txt") << "0 1\n10 2\n";

  SUBCASE("complete file") {
    std::ofstream(dir / "ok.cfg") << "# demo\n"
                                     "DSM = dsm.asc\n"
                                     "riverbed_mask = mask.txt\n"
                                     "boundary.west = discharge\n"
                                     "boundary.east = outflow\n"
                                     "manning_n = 0.03\n"
                                     "cfl = 0.4\n"
                                     "spinup_q = 1\n"
                                     "spinup_duration = 5\n"
                                     "hydrograph = hydro.txt\n"
                                     "total_duration = 20\n"
                                     "blocks = 2\n";
    const Scenario s = load_scenario(dir / "ok.cfg");
    CHECK(s.dsm.ncols == 4);
    CHECK(s.boundaries[Edge::West].kind == boundary::BoundaryKind::Discharge);
    CHECK(s.boundaries[Edge::West].mask == std::vector<int>{1});
    CHECK(s.boundaries[Edge::East].kind == boundary::BoundaryKind::FreeOutflow);
    CHECK(s.params.manning_n == 0.03);
    CHECK(s.params.cfl == 0.4);
    CHECK(s.solver.blocks == 2);
    CHECK(s.snapshot_interval == 20.0);
    CHECK(s.hydrograph.knots.size() == 2);
    CHECK(s.warnings.empty());
  }
  SUBCASE("unknown key names its line") {
    std::ofstream(dir / "bad.cfg") << "dsm = dsm.asc\n\nmanning = 0.03\n";
    try {
      load_scenario(dir / "bad.cfg");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("bad.cfg") != std::string::npos);
    }
  }
  SUBCASE("duplicate key") {
    std::istringstream in("dsm = dsm.asc\ncfl = 0.5\ncfl = 0.6\ntotal_duration = 1\n");
    CHECK_THROWS_AS(parse_scenario(in, dir), ParseError);
  }
  SUBCASE("bad values") {
    std::istringstream in("dsm = dsm.asc\ncfl = fast\ntotal_duration = 1\n");
    CHECK_THROWS_AS(parse_scenario(in, dir), ParseError);
  }
  SUBCASE("discharge edge without a mask") {
    std::istringstream in("dsm = dsm.asc\nboundary.west = discharge\nspinup_q = 1\ntotal_duration = 1\n");
    CHECK_THROWS_AS(parse_scenario(in, dir), ConfigError);
  }
  SUBCASE("missing files") {
    std::istringstream in("dsm = nowhere.asc\ntotal_duration = 1\n");
    CHECK_THROWS_AS(parse_scenario(in, dir), ConfigError);
    CHECK_THROWS_AS(load_scenario(dir / "absent.cfg"), ConfigError);
  }
  SUBCASE("large CFL is accepted with a warning") {
    std::istringstream in("dsm = dsm.asc\ncfl = 1.5\ntotal_duration = 1\n");
    const Scenario s = parse_scenario(in, dir);
    CHECK(s.warnings.size() == 1);
  }
}
