#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swflood/boundary.hpp"
#include "swflood/raster_io.hpp"
#include "swflood/solver_2d.hpp"
#include "swflood/state_grid.hpp"

namespace swflood {

/// Piecewise-linear discharge series, clamped outside its knots.
struct Hydrograph {
  std::vector<std::pair<double, double>> knots;  ///< (t seconds, Q m^3/s)

  /// Throws ConfigError unless t is strictly increasing, Q >= 0 and there is at least one knot.
  void validate() const;
};

double interpolate_q(const Hydrograph& hg, double t);

/// Two-column `t Q` text, `#` comments.
Hydrograph parse_hydrograph(std::istream& in);
Hydrograph parse_hydrograph_file(const std::filesystem::path& path);

struct SpinUp {
  double q_const = 0.0;   ///< m^3/s
  double duration = 0.0;  ///< s
};

struct Scenario {
  RasterGrid dsm;
  bool nodata_as_wall = false;
  double initial_depth = 0.0;                 ///< uniform depth
  std::optional<RasterGrid> initial_depth_map;  ///< per-cell depth, overrides initial_depth
  std::optional<double> initial_level;        ///< fill to this free surface, overrides both

  boundary::BoundarySpec boundaries;  ///< discharge function is installed by the simulation
  PhysicalParams params;
  SolverOptions solver;

  SpinUp spin_up;
  Hydrograph hydrograph;  ///< times relative to the end of the spin-up
  double total_duration = 0.0;
  double snapshot_interval = 0.0;
  std::filesystem::path output_dir;  ///< empty: no files written

  std::vector<std::string> warnings;  ///< non-fatal findings from loading

  void validate() const;
};

/// Q(t): the spin-up constant until spin_up.duration, then the hydrograph.
double scenario_discharge(const Scenario& scn, double t);

/// Cellwise maxima over the run.
struct MaximaMaps {
  Field2D max_h;
  Field2D max_speed;
  Field2D time_of_max_h;

  MaximaMaps() = default;
  MaximaMaps(int nx, int ny) : max_h(nx, ny), max_speed(nx, ny), time_of_max_h(nx, ny) {}

  void update(const State& state, double t, double h_dry);
};

struct MassBalance {
  double initial_storage = 0.0;
  double final_storage = 0.0;
  double inflow = 0.0;
  double outflow = 0.0;

  double imbalance() const { return inflow - outflow - (final_storage - initial_storage); }
  /// |imbalance| relative to max(inflow, initial storage); absolute when both are zero.
  double relative_closure() const;
};

struct RunResult {
  MaximaMaps maxima;
  MassBalance mass;
  State final_state;
  std::vector<std::filesystem::path> snapshots;
  long steps = 0;
  std::size_t critical_fallbacks = 0;
  double end_time = 0.0;
};

/// Step-level driver around a Solver: advances in time, honours snapshot and phase
/// boundaries exactly, tracks maxima and mass balance, reads and writes checkpoints.
class Simulation {
 public:
  explicit Simulation(const Scenario& scenario);

  /// Called after every step with the diagnostics of that step.
  using StepObserver = std::function<void(const Simulation&, const StepDiagnostics&)>;

  /// Runs until time t_end (clamped to total_duration).
  void advance_to(double t_end, const StepObserver& observer = {});

  double time() const { return solver_.time(); }
  long steps() const { return solver_.step_count(); }
  const Solver& solver() const { return solver_; }
  const Scenario& scenario() const { return scenario_; }
  const MaximaMaps& maxima() const { return maxima_; }
  MassBalance mass_balance() const;
  std::size_t critical_fallbacks() const { return critical_fallbacks_; }
  const std::vector<std::filesystem::path>& snapshots() const { return snapshots_; }

  /// Writes h, u, v (and the state passed in, if any) as ASCII grids named <field>_<label>.asc.
  void write_fields(const State& state, const std::string& label);
  /// Writes max_h.asc, max_speed.asc and time_of_max_h.asc.
  void write_maxima() const;

  /// Binary checkpoint: header (t, step count, params hash), then little-endian doubles.
  void write_checkpoint(const std::filesystem::path& path) const;
  void read_checkpoint(const std::filesystem::path& path);

 private:
  double next_stop(double t_end) const;

  Scenario scenario_;
  Solver solver_;
  MaximaMaps maxima_;
  double initial_storage_ = 0.0;
  double inflow_ = 0.0;
  double outflow_ = 0.0;
  long next_snapshot_ = 1;
  std::size_t critical_fallbacks_ = 0;
  std::vector<std::filesystem::path> snapshots_;
};

/// Full scenario run. On a numerical abort the last good state is written as
/// <field>_lastgood.asc before the error propagates.
RunResult run(const Scenario& scenario, const Simulation::StepObserver& observer = {});

/// Max-norm change of h between consecutive samples, relative to the larger sample's max |h|.
std::vector<double> steady_state_monitor(std::span<const Field2D> history);

/// Stable FNV-1a hash of the physical parameters, stored in checkpoints.
std::uint64_t params_hash(const PhysicalParams& params);

/// Loads a `key = value` scenario file; relative paths resolve against its directory.
Scenario load_scenario(const std::filesystem::path& config_path);
Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir);

}  // namespace swflood
