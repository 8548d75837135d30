#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "swflood/boundary.hpp"
#include "swflood/parallel_partition.hpp"
#include "swflood/state_grid.hpp"

namespace swflood {

enum class SpatialOrder { First = 1, Second = 2 };
enum class TimeScheme { Euler, Heun };

/// How |q^n| is formed in the semi-implicit friction update: from the momentum component
/// being updated, or from the full discharge magnitude shared by both components.
enum class FrictionCoupling { PerComponent, Magnitude };

struct SolverOptions {
  double dt_min = 1e-8;
  double dt_max = 10.0;
  int blocks = 1;
  SpatialOrder order = SpatialOrder::Second;
  TimeScheme time_scheme = TimeScheme::Heun;
  FrictionCoupling friction = FrictionCoupling::PerComponent;
};

struct StepDiagnostics {
  double dt_used = 0.0;
  double max_wave_speed = 0.0;
  double min_h = 0.0;
  double inflow_volume = 0.0;   ///< m^3 entering through the domain edges this step
  double outflow_volume = 0.0;  ///< m^3 leaving through the domain edges this step
  std::size_t critical_fallbacks = 0;
};

/// Time derivative of the conserved variables on interior cells, plus the mass flow
/// rates (m^3/s) through the physical domain edges the state touches.
struct Residual {
  Field2D dh;
  Field2D dhu;
  Field2D dhv;
  double inflow_rate = 0.0;
  double outflow_rate = 0.0;
};

/// Evaluates L(U) for a state whose ghost cells are filled. `where` tells which of the
/// state's edges are domain edges (for the inflow/outflow bookkeeping).
void spatial_residual(const State& state, const PhysicalParams& params, SpatialOrder order, Residual& out,
                      const boundary::Placement& where);
Residual spatial_residual(const State& state, const PhysicalParams& params,
                          SpatialOrder order = SpatialOrder::Second);

/// Largest |u| + sqrt(g h) and |v| + sqrt(g h) over wet interior cells and the first
/// ghost layer on physical edges.
double max_wave_speed(const State& state, const PhysicalParams& params, const boundary::Placement& where);

/// CFL time step cfl * min(dx, dy) / max wave speed, capped at dt_max (and dt_max for a
/// dry grid). Throws NumericalError when it falls below dt_min.
double compute_dt(const State& state, const PhysicalParams& params, const SolverOptions& options);

/// Semi-implicit Manning update of one discharge component. h_next is the depth after the
/// hyperbolic stage, h_n and q_n_abs the depth and |q| before it.
inline double friction_step(double q_star, double q_n_abs, double h_n, double h_next, double dt,
                            const PhysicalParams& params) {
  if (h_next <= params.h_dry) return 0.0;
  if (params.manning_n == 0.0 || q_n_abs == 0.0 || h_n <= params.h_dry) return q_star;
  const double h43 = h_next * std::cbrt(h_next);
  return q_star / (1.0 + dt * params.manning_n * params.manning_n * q_n_abs / (h_n * h43));
}

/// Block-parallel integrator. Owns the state split over a partition; each step runs
/// halo exchange, boundary filling, residual, update and friction per stage.
class Solver {
 public:
  Solver(const State& initial, const PhysicalParams& params, boundary::BoundarySpec spec,
         const SolverOptions& options = {});

  /// Advances one TVD-RK2 (or Euler) step with dt <= dt_cap.
  StepDiagnostics step(double dt_cap = std::numeric_limits<double>::infinity());

  double time() const noexcept { return time_; }
  long step_count() const noexcept { return steps_; }
  const PhysicalParams& params() const noexcept { return params_; }
  const SolverOptions& options() const noexcept { return options_; }
  const parallel::Partition& partition() const noexcept { return partition_; }
  const boundary::BoundarySpec& boundary_spec() const noexcept { return spec_; }

  /// Gathers the block interiors into a global state (topography and ghosts from construction).
  State state() const;
  /// State at the start of the step in progress (or the current state between steps);
  /// after a NumericalError this is the last state that passed the checks.
  State last_good_state() const;
  /// Total volume: per-block sums reduced over a fixed pairwise tree.
  double volume() const;

  /// Replaces the conserved fields and clock, e.g. when restarting from a checkpoint.
  void restore(const State& conserved, double time, long steps);
  /// Snaps the clock onto a target it reached up to round-off.
  void snap_time(double t) { time_ = t; }

 private:
  struct Block {
    Field2D h0;
    Field2D hu0;
    Field2D hv0;
    Residual residual;
    boundary::Placement where;
    boundary::BoundaryStats stats;
  };

  void fill_ghosts(double t);
  void check_block(std::size_t b, const char* stage) const;

  PhysicalParams params_;
  boundary::BoundarySpec spec_;
  SolverOptions options_;
  parallel::Partition partition_;
  State global_;
  std::vector<State> states_;
  std::vector<Block> blocks_;
  double time_ = 0.0;
  long steps_ = 0;
  bool in_step_ = false;
};

}  // namespace swflood
