#include "swflood/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "swflood/boundary.hpp"
#include "swflood/errors.hpp"

namespace swflood::validation {

AnalyticalCase lake_at_rest_case(std::function<double(double)> bed, double level, double length, double horizon,
                                 std::string name) {
  AnalyticalCase c;
  c.name = std::move(name);
  c.length = length;
  c.horizon = horizon;
  c.bed = bed;
  c.exact = [bed, level](double x, double) { return Profile{std::max(level - bed(x), 0.0), 0.0}; };
  return c;
}

namespace {

double parabolic_bump(double x) { return x > 8.0 && x < 12.0 ? 0.2 - 0.05 * (x - 10.0) * (x - 10.0) : 0.0; }

}  // namespace

AnalyticalCase submerged_bump_case() { return lake_at_rest_case(parabolic_bump, 0.5, 25.0, 10.0, "lake-at-rest"); }

AnalyticalCase emerged_bump_case() { return lake_at_rest_case(parabolic_bump, 0.1, 25.0, 10.0, "lake-emerged"); }

Profile ritter_solution(double x, double t, double x0, double h_l, double g) {
  const double c_l = std::sqrt(g * h_l);
  if (t <= 0.0) return x <= x0 ? Profile{h_l, 0.0} : Profile{0.0, 0.0};
  const double xi = (x - x0) / t;
  if (xi <= -c_l) return {h_l, 0.0};
  if (xi >= 2.0 * c_l) return {0.0, 0.0};
  const double c = (2.0 * c_l - xi) / 3.0;
  return {c * c / g, 2.0 / 3.0 * (xi + c_l)};
}

double stoker_middle_depth(double h_l, double h_r, double g) {
  if (!(h_l > h_r && h_r > 0.0)) throw std::invalid_argument("stoker_middle_depth: need h_l > h_r > 0");
  const double c_l = std::sqrt(g * h_l);
  // Rarefaction velocity minus shock velocity behind the jump; decreasing in h.
  auto f = [&](double h) {
    return 2.0 * (c_l - std::sqrt(g * h)) - (h - h_r) * std::sqrt(0.5 * g * (h + h_r) / (h * h_r));
  };
  double lo = h_r;
  double hi = h_l;
  if (!(f(lo) > 0.0 && f(hi) < 0.0)) throw std::logic_error("stoker_middle_depth: root not bracketed");
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double stoker_shock_speed(double h_l, double h_r, double g) {
  const double h_m = stoker_middle_depth(h_l, h_r, g);
  const double u_m = 2.0 * (std::sqrt(g * h_l) - std::sqrt(g * h_m));
  return h_m * u_m / (h_m - h_r);
}

Profile stoker_solution(double x, double t, double x0, double h_l, double h_r, double g) {
  if (h_l == h_r) return {h_l, 0.0};
  if (t <= 0.0) return x <= x0 ? Profile{h_l, 0.0} : Profile{h_r, 0.0};
  const double c_l = std::sqrt(g * h_l);
  const double h_m = stoker_middle_depth(h_l, h_r, g);
  const double c_m = std::sqrt(g * h_m);
  const double u_m = 2.0 * (c_l - c_m);
  const double s = h_m * u_m / (h_m - h_r);
  const double xi = (x - x0) / t;
  if (xi <= -c_l) return {h_l, 0.0};
  if (xi <= u_m - c_m) {
    const double c = (2.0 * c_l - xi) / 3.0;
    return {c * c / g, 2.0 / 3.0 * (xi + c_l)};
  }
  if (xi < s) return {h_m, u_m};
  return {h_r, 0.0};
}

namespace {

// Wave function of the depth-positivity Riemann solver: velocity jump across a wave from h_k to h.
double wave_fn(double h, double h_k, double g) {
  if (h <= h_k) return 2.0 * (std::sqrt(g * h) - std::sqrt(g * h_k));
  return (h - h_k) * std::sqrt(0.5 * g * (h + h_k) / (h * h_k));
}

Profile sample_left_dry_right(double hL, double uL, double g, double xi) {
  const double cL = std::sqrt(g * hL);
  if (xi <= uL - cL) return {hL, uL};
  if (xi >= uL + 2.0 * cL) return {0.0, 0.0};
  const double c = (uL + 2.0 * cL - xi) / 3.0;
  return {c * c / g, (uL + 2.0 * cL + 2.0 * xi) / 3.0};
}

Profile sample_dry_left(double hR, double uR, double g, double xi) {
  const double cR = std::sqrt(g * hR);
  if (xi >= uR + cR) return {hR, uR};
  if (xi <= uR - 2.0 * cR) return {0.0, 0.0};
  const double c = (-uR + 2.0 * cR + xi) / 3.0;
  return {c * c / g, (uR - 2.0 * cR + 2.0 * xi) / 3.0};
}

}  // namespace

Profile riemann_sample(double hL, double uL, double hR, double uR, double g, double xi) {
  if (hL <= 0.0 && hR <= 0.0) return {0.0, 0.0};
  if (hR <= 0.0) return sample_left_dry_right(hL, uL, g, xi);
  if (hL <= 0.0) return sample_dry_left(hR, uR, g, xi);

  const double cL = std::sqrt(g * hL);
  const double cR = std::sqrt(g * hR);
  if (2.0 * (cL + cR) <= uR - uL) {
    // Two rarefactions separated by a dry region.
    if (xi <= uL + 2.0 * cL) return sample_left_dry_right(hL, uL, g, xi);
    if (xi >= uR - 2.0 * cR) return sample_dry_left(hR, uR, g, xi);
    return {0.0, 0.0};
  }

  auto f = [&](double h) { return wave_fn(h, hL, g) + wave_fn(h, hR, g) + uR - uL; };
  double lo = 0.0;
  double hi = std::max(hL, hR);
  while (f(hi) < 0.0) hi *= 2.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  const double hs = 0.5 * (lo + hi);
  const double us = 0.5 * (uL + uR) + 0.5 * (wave_fn(hs, hR, g) - wave_fn(hs, hL, g));
  const double cs = std::sqrt(g * hs);

  if (xi <= us) {
    if (hs > hL) {
      const double s = uL - cL * std::sqrt(0.5 * (hs + hL) * hs / (hL * hL));
      return xi <= s ? Profile{hL, uL} : Profile{hs, us};
    }
    if (xi <= uL - cL) return {hL, uL};
    if (xi >= us - cs) return {hs, us};
    const double c = (uL + 2.0 * cL - xi) / 3.0;
    return {c * c / g, (uL + 2.0 * cL + 2.0 * xi) / 3.0};
  }
  if (hs > hR) {
    const double s = uR + cR * std::sqrt(0.5 * (hs + hR) * hs / (hR * hR));
    return xi >= s ? Profile{hR, uR} : Profile{hs, us};
  }
  if (xi >= uR + cR) return {hR, uR};
  if (xi <= us + cs) return {hs, us};
  const double c = (-uR + 2.0 * cR + xi) / 3.0;
  return {c * c / g, (uR - 2.0 * cR + 2.0 * xi) / 3.0};
}

kernels::NumericalFlux exact_riemann_flux(double hL, double uL, double hR, double uR, double g) {
  const Profile p = riemann_sample(hL, uL, hR, uR, g, 0.0);
  const double q = p.h * p.u;
  return {q, q * p.u + 0.5 * g * p.h * p.h, 0.0};
}

AnalyticalCase ritter_case(double h_l, double length, double g) {
  AnalyticalCase c;
  c.name = "ritter";
  c.length = length;
  c.g = g;
  const double x0 = 0.5 * length;
  c.horizon = 0.25 * length / (2.0 * std::sqrt(g * h_l));
  c.bed = [](double) { return 0.0; };
  c.exact = [=](double x, double t) { return ritter_solution(x, t, x0, h_l, g); };
  return c;
}

AnalyticalCase stoker_case(double h_l, double h_r, double length, double g) {
  AnalyticalCase c;
  c.name = "stoker";
  c.length = length;
  c.g = g;
  const double x0 = 0.5 * length;
  c.horizon = 0.25 * length / stoker_shock_speed(h_l, h_r, g);
  c.bed = [](double) { return 0.0; };
  c.exact = [=](double x, double t) { return stoker_solution(x, t, x0, h_l, h_r, g); };
  return c;
}

Norms error_norms(std::span<const double> numeric, std::span<const double> exact, double dx) {
  if (numeric.size() != exact.size()) throw std::invalid_argument("error_norms: size mismatch");
  Norms n;
  double sq = 0.0;
  for (std::size_t k = 0; k < numeric.size(); ++k) {
    const double e = std::abs(numeric[k] - exact[k]);
    n.l1 += e;
    sq += e * e;
    n.linf = std::max(n.linf, e);
  }
  n.l1 *= dx;
  n.l2 = std::sqrt(sq * dx);
  return n;
}

double observed_order(double coarse_error, double fine_error) {
  if (coarse_error == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::log2(coarse_error / fine_error);
}

State strip_state(const AnalyticalCase& c, int n) {
  const double dx = c.length / n;
  State s(n, 3, dx, dx);
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) * dx;
    const Profile p = c.exact(x, 0.0);
    for (int j = 0; j < 3; ++j) {
      s.z(i, j) = c.bed(x);
      s.h(i, j) = p.h;
      s.hu(i, j) = p.h * p.u;
    }
  }
  return s;
}

StripResult run_strip(const AnalyticalCase& c, int n, const StripOptions& options) {
  PhysicalParams params;
  params.g = c.g;
  params.cfl = options.cfl;
  boundary::BoundarySpec spec;
  spec[Edge::East].kind = boundary::BoundaryKind::FreeOutflow;
  spec[Edge::West].kind = boundary::BoundaryKind::FreeOutflow;
  SolverOptions so;
  so.blocks = options.blocks;
  so.order = options.order;

  Solver solver(strip_state(c, n), params, spec, so);
  StripResult r;
  r.n = n;
  r.dx = c.length / n;
  r.min_h = std::numeric_limits<double>::infinity();
  while (solver.time() < c.horizon) {
    const StepDiagnostics d = solver.step(c.horizon - solver.time());
    if (c.horizon - solver.time() <= 1e-12 * c.horizon) solver.snap_time(c.horizon);
    r.min_h = std::min(r.min_h, d.min_h);
    if (options.on_step) options.on_step(solver, d);
  }
  r.time = solver.time();
  r.steps = solver.step_count();
  r.final_state = solver.state();
  const State& s = r.final_state;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) * r.dx;
    const Profile p = c.exact(x, r.time);
    r.x.push_back(x);
    r.h.push_back(s.h(i, 1));
    r.u.push_back(velocity(s.h(i, 1), s.hu(i, 1), params.h_dry));
    r.h_exact.push_back(p.h);
    r.u_exact.push_back(p.u);
  }
  return r;
}

State bump_lake_2d(int n, double height, double level) {
  const double dx = 1.0 / n;
  State s(n, n, dx, dx);
  const double r2max = 0.3 * 0.3;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) * dx - 0.5;
      const double y = (j + 0.5) * dx - 0.5;
      s.z(i, j) = height * std::max(0.0, 1.0 - (x * x + y * y) / r2max);
      s.h(i, j) = std::max(level - s.z(i, j), 0.0);
    }
  }
  return s;
}

AnalyticalCase case_by_name(const std::string& name) {
  if (name == "lake-at-rest") return submerged_bump_case();
  if (name == "lake-emerged") return emerged_bump_case();
  if (name == "ritter") return ritter_case();
  if (name == "stoker") return stoker_case();
  throw ConfigError("unknown validation case '" + name + "'");
}

std::vector<ValidationRow> validate_case(const std::string& name, int n, const StripOptions& options) {
  const AnalyticalCase c = case_by_name(name);
  std::vector<ValidationRow> rows;
  for (int cells : {n / 2, n}) {
    const StripResult r = run_strip(c, cells, options);
    ValidationRow row;
    row.case_name = name;
    row.n = cells;
    row.h = error_norms(r.h, r.h_exact, r.dx);
    row.u = error_norms(r.u, r.u_exact, r.dx);
    row.order_l1_h = rows.empty() ? std::numeric_limits<double>::quiet_NaN() : observed_order(rows.back().h.l1, row.h.l1);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace swflood::validation
