#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "swflood/scheme_kernels.hpp"
#include "swflood/solver_2d.hpp"
#include "swflood/state_grid.hpp"

namespace swflood::validation {

struct Profile {
  double h = 0.0;
  double u = 0.0;
};

/// One-dimensional test problem on [0, length] with a known solution.
struct AnalyticalCase {
  std::string name;
  double length = 1.0;
  double horizon = 1.0;  ///< s
  double g = 9.81;
  std::function<double(double)> bed;                 ///< z(x)
  std::function<Profile(double, double)> exact;      ///< (x, t) -> (h, u); t = 0 is the initial state
};

/// Still water at free-surface level `level` over `bed`; h = max(level - z, 0).
AnalyticalCase lake_at_rest_case(std::function<double(double)> bed, double level, double length, double horizon,
                                 std::string name = "lake-at-rest");
/// Parabolic bump 0.2 - 0.05 (x - 10)^2 on [8, 12] in a 25 m channel; level 0.5 (submerged).
AnalyticalCase submerged_bump_case();
/// Same bump with level 0.1, so the crest stays dry.
AnalyticalCase emerged_bump_case();

/// Dam break onto a dry bed at x0 = length/2, run until the front reaches 3/4 of the domain.
AnalyticalCase ritter_case(double h_l = 1.0, double length = 10.0, double g = 9.81);
/// Wet dam break at x0 = length/2, run until the shock has travelled length/4.
AnalyticalCase stoker_case(double h_l = 1.0, double h_r = 0.1, double length = 10.0, double g = 9.81);

Profile ritter_solution(double x, double t, double x0, double h_l, double g);
Profile stoker_solution(double x, double t, double x0, double h_l, double h_r, double g);

/// Middle depth of the Stoker problem, bisection on (h_r, h_l).
double stoker_middle_depth(double h_l, double h_r, double g);
/// Speed of the Stoker shock from the jump conditions.
double stoker_shock_speed(double h_l, double h_r, double g);

/// Exact solution of the 1D Riemann problem (wet or dry states) at x / t = xi.
Profile riemann_sample(double hL, double uL, double hR, double uR, double g, double xi);
/// Physical flux of the exact Riemann solution at the interface (xi = 0); f_hv = 0.
kernels::NumericalFlux exact_riemann_flux(double hL, double uL, double hR, double uR, double g);

struct Norms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

Norms error_norms(std::span<const double> numeric, std::span<const double> exact, double dx);

/// log2(coarse / fine) for a grid refined by two.
double observed_order(double coarse_error, double fine_error);

struct StripOptions {
  int blocks = 1;
  double cfl = 0.5;
  SpatialOrder order = SpatialOrder::Second;
  /// Called after every step with the solver, e.g. to check positivity.
  std::function<void(const Solver&, const StepDiagnostics&)> on_step;
};

/// Numerical profile along the middle row of a strip run.
struct StripResult {
  int n = 0;
  double dx = 0.0;
  double time = 0.0;
  long steps = 0;
  double min_h = 0.0;  ///< smallest depth seen after any step
  std::vector<double> x;
  std::vector<double> h;
  std::vector<double> u;
  std::vector<double> h_exact;
  std::vector<double> u_exact;
  State final_state;
};

/// Initial state of a case on an n x 3 strip (dx = dy = length / n).
State strip_state(const AnalyticalCase& c, int n);

/// Runs a case on the 2D solver as a y-invariant strip: walls north and south, free
/// outflow east and west.
StripResult run_strip(const AnalyticalCase& c, int n, const StripOptions& options = {});

/// Lake at rest over the radial bump z = height * max(0, 1 - r^2 / (0.3 L)^2) on an
/// n x n grid of side L = 1, level 1. A height above 1 leaves a dry island.
State bump_lake_2d(int n, double height, double level = 1.0);

struct ValidationRow {
  std::string case_name;
  int n = 0;
  Norms h;
  Norms u;
  double order_l1_h = 0.0;  ///< NaN when the coarse error is zero
};

/// Runs a named case ("lake-at-rest", "lake-emerged", "ritter", "stoker") at n/2 and n.
std::vector<ValidationRow> validate_case(const std::string& name, int n, const StripOptions& options = {});

AnalyticalCase case_by_name(const std::string& name);

}  // namespace swflood::validation
