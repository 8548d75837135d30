#include "swflood/solver_2d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swflood/errors.hpp"
#include "swflood/scheme_kernels.hpp"

namespace swflood {

namespace {

using boundary::Placement;

// One grid line (a row for the x sweep, a column for the y sweep) seen as a 1D problem.
// Pointers address interior cell 0; valid offsets are -kGhost .. n + kGhost - 1.
struct Line {
  const double* h;
  const double* qn;  // normal discharge
  const double* qt;  // transverse discharge
  const double* z;
  std::ptrdiff_t stride;
  int n;
};

struct LineOut {
  double* dh;
  double* dqn;
  double* dqt;
  std::ptrdiff_t stride;
};

// Cell traces are stored at index k + 1 for k in [-1, n]; interface k+1/2 at index k + 1
// for k in [-1, n - 1]; velocities at k + 2 for k in [-2, n + 1].
struct Scratch {
  std::vector<double> u, v;
  std::vector<double> hm, hp, zm, zp, um, up, vm, vp;
  std::vector<double> f_h, f_left, f_right, f_t;

  void resize(int n) {
    const auto cells = static_cast<std::size_t>(n + 2 * kGhost);
    const auto traces = static_cast<std::size_t>(n + 2);
    for (auto* v_ : {&u, &v}) v_->resize(cells);
    for (auto* v_ : {&hm, &hp, &zm, &zp, &um, &up, &vm, &vp}) v_->resize(traces);
    for (auto* v_ : {&f_h, &f_left, &f_right, &f_t}) v_->resize(static_cast<std::size_t>(n + 1));
  }
};

// Returns the mass fluxes through the first (-1/2) and last (n-1/2) interfaces of the line.
std::pair<double, double> sweep_line(const Line& line, const LineOut& out, double dx, const PhysicalParams& p,
                                     SpatialOrder order, Scratch& s) {
  using namespace kernels;
  const int n = line.n;
  const std::ptrdiff_t st = line.stride;
  const double g = p.g;
  const double inv_dx = 1.0 / dx;

  for (int k = -kGhost; k < n + kGhost; ++k) {
    const double h = line.h[k * st];
    s.u[k + 2] = velocity(h, line.qn[k * st], p.h_dry);
    s.v[k + 2] = velocity(h, line.qt[k * st], p.h_dry);
  }

  for (int k = -1; k <= n; ++k) {
    const double h = line.h[k * st];
    const double z = line.z[k * st];
    const double u = s.u[k + 2];
    const double v = s.v[k + 2];
    const auto t = static_cast<std::size_t>(k + 1);
    if (order == SpatialOrder::First) {
      s.hm[t] = s.hp[t] = h;
      s.zm[t] = s.zp[t] = z;
      s.um[t] = s.up[t] = u;
      s.vm[t] = s.vp[t] = v;
      continue;
    }
    const double h_prev = line.h[(k - 1) * st];
    const double h_next = line.h[(k + 1) * st];
    const Traces ht = muscl_reconstruct(h_prev, h, h_next, dx);
    const Traces eta = muscl_reconstruct(h_prev + line.z[(k - 1) * st], h + z, h_next + line.z[(k + 1) * st], dx);
    s.hm[t] = ht.minus;
    s.hp[t] = ht.plus;
    s.zm[t] = eta.minus - ht.minus;
    s.zp[t] = eta.plus - ht.plus;
    if (h > p.h_dry) {
      const double du = limited_slope(s.u[k + 1], u, s.u[k + 3], dx);
      const double dv = limited_slope(s.v[k + 1], v, s.v[k + 3], dx);
      const Traces ut = velocity_reconstruct(u, h, ht, du, dx);
      const Traces vt = velocity_reconstruct(v, h, ht, dv, dx);
      s.um[t] = ut.minus;
      s.up[t] = ut.plus;
      s.vm[t] = vt.minus;
      s.vp[t] = vt.plus;
    } else {
      s.um[t] = s.up[t] = 0.0;
      s.vm[t] = s.vp[t] = 0.0;
    }
  }

  for (int k = -1; k < n; ++k) {
    const auto l = static_cast<std::size_t>(k + 1);  // cell k traces
    const auto r = l + 1;                             // cell k + 1 traces
    const InterfaceStates is =
        hydrostatic_reconstruct({s.hp[l], s.zp[l], s.up[l], s.vp[l]}, {s.hm[r], s.zm[r], s.um[r], s.vm[r]});
    const NumericalFlux f = hllc_flux(is.hL, is.uL, is.vL, is.hR, is.uR, is.vR, g);
    const InterfaceSources src = interface_sources(is.h_minus, is.h_plus, is.hL, is.hR, g);
    s.f_h[l] = f.f_h;
    s.f_left[l] = f.f_hu + src.left;
    s.f_right[l] = f.f_hu + src.right;
    s.f_t[l] = f.f_hv;
  }

  for (int i = 0; i < n; ++i) {
    const auto t = static_cast<std::size_t>(i + 1);
    const auto west = static_cast<std::size_t>(i);  // interface i - 1/2
    const auto east = west + 1;                      // interface i + 1/2
    const double fc = centered_source(s.hm[t], s.hp[t], s.zm[t], s.zp[t], g);
    out.dh[i * out.stride] -= (s.f_h[east] - s.f_h[west]) * inv_dx;
    out.dqn[i * out.stride] -= (s.f_left[east] - s.f_right[west] - fc) * inv_dx;
    out.dqt[i * out.stride] -= (s.f_t[east] - s.f_t[west]) * inv_dx;
  }
  return {s.f_h.front(), s.f_h.back()};
}

bool west_physical(const State&, const Placement& w) { return w.col_offset == 0; }
bool east_physical(const State& s, const Placement& w) { return w.col_offset + s.nx == w.global_nx; }
bool south_physical(const State&, const Placement& w) { return w.row_offset == 0; }
bool north_physical(const State& s, const Placement& w) { return w.row_offset + s.ny == w.global_ny; }

void add_edge_flow(double flow, bool entering_positive, Residual& out) {
  const double in = entering_positive ? flow : -flow;
  if (in >= 0.0) {
    out.inflow_rate += in;
  } else {
    out.outflow_rate -= in;
  }
}

}  // namespace

void spatial_residual(const State& state, const PhysicalParams& params, SpatialOrder order, Residual& out,
                      const Placement& where) {
  if (out.dh.nx() != state.nx || out.dh.ny() != state.ny) {
    out.dh = Field2D(state.nx, state.ny);
    out.dhu = Field2D(state.nx, state.ny);
    out.dhv = Field2D(state.nx, state.ny);
  } else {
    std::fill(out.dh.raw().begin(), out.dh.raw().end(), 0.0);
    std::fill(out.dhu.raw().begin(), out.dhu.raw().end(), 0.0);
    std::fill(out.dhv.raw().begin(), out.dhv.raw().end(), 0.0);
  }
  out.inflow_rate = 0.0;
  out.outflow_rate = 0.0;

  thread_local Scratch scratch;

  scratch.resize(state.nx);
  const bool west = west_physical(state, where);
  const bool east = east_physical(state, where);
  for (int j = 0; j < state.ny; ++j) {
    const Line line{state.h.ptr(0, j), state.hu.ptr(0, j), state.hv.ptr(0, j), state.z.ptr(0, j), 1, state.nx};
    const LineOut lo{out.dh.ptr(0, j), out.dhu.ptr(0, j), out.dhv.ptr(0, j), 1};
    const auto [first, last] = sweep_line(line, lo, state.dx, params, order, scratch);
    if (west) add_edge_flow(first * state.dy, true, out);
    if (east) add_edge_flow(last * state.dy, false, out);
  }

  scratch.resize(state.ny);
  const bool south = south_physical(state, where);
  const bool north = north_physical(state, where);
  const std::ptrdiff_t st = state.h.stride();
  for (int i = 0; i < state.nx; ++i) {
    const Line line{state.h.ptr(i, 0), state.hv.ptr(i, 0), state.hu.ptr(i, 0), state.z.ptr(i, 0), st, state.ny};
    const LineOut lo{out.dh.ptr(i, 0), out.dhv.ptr(i, 0), out.dhu.ptr(i, 0), st};
    const auto [first, last] = sweep_line(line, lo, state.dy, params, order, scratch);
    if (south) add_edge_flow(first * state.dx, true, out);
    if (north) add_edge_flow(last * state.dx, false, out);
  }
}

Residual spatial_residual(const State& state, const PhysicalParams& params, SpatialOrder order) {
  Residual r;
  spatial_residual(state, params, order, r, Placement::whole(state));
  return r;
}

double max_wave_speed(const State& state, const PhysicalParams& params, const Placement& where) {
  double smax = 0.0;
  auto visit = [&](int i, int j) {
    const double h = state.h(i, j);
    if (h <= params.h_dry) return;
    const double c = std::sqrt(params.g * h);
    smax = std::max({smax, std::abs(state.hu(i, j) / h) + c, std::abs(state.hv(i, j) / h) + c});
  };
  for (int j = 0; j < state.ny; ++j) {
    for (int i = 0; i < state.nx; ++i) visit(i, j);
  }
  if (west_physical(state, where)) {
    for (int j = 0; j < state.ny; ++j) visit(-1, j);
  }
  if (east_physical(state, where)) {
    for (int j = 0; j < state.ny; ++j) visit(state.nx, j);
  }
  if (south_physical(state, where)) {
    for (int i = 0; i < state.nx; ++i) visit(i, -1);
  }
  if (north_physical(state, where)) {
    for (int i = 0; i < state.nx; ++i) visit(i, state.ny);
  }
  return smax;
}

double compute_dt(const State& state, const PhysicalParams& params, const SolverOptions& options) {
  const double smax = max_wave_speed(state, params, Placement::whole(state));
  if (smax == 0.0) return options.dt_max;
  const double dt = params.cfl * std::min(state.dx, state.dy) / smax;
  if (!(dt >= options.dt_min)) {
    throw NumericalError("time step " + std::to_string(dt) + " s fell below dt_min", 0.0, 0, -1, -1);
  }
  return std::min(dt, options.dt_max);
}

Solver::Solver(const State& initial, const PhysicalParams& params, boundary::BoundarySpec spec,
               const SolverOptions& options)
    : params_(params), spec_(std::move(spec)), options_(options), global_(initial) {
  params_.validate();
  spec_.validate(initial.nx, initial.ny);
  if (!(options_.dt_min > 0.0) || !(options_.dt_max >= options_.dt_min)) {
    throw ConfigError("need 0 < dt_min <= dt_max");
  }
  partition_ = parallel::partition(initial.ny, initial.nx, options_.blocks);
  boundary::init_ghost_topography(global_, spec_, Placement::whole(global_));
  states_ = parallel::scatter(global_, partition_);
  blocks_.resize(states_.size());
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& ext = partition_.blocks[b];
    blocks_[b].where = {ext.col_begin, ext.row_begin, global_.nx, global_.ny};
  }
  for (std::size_t b = 0; b < blocks_.size(); ++b) check_block(b, "initial state");
}

void Solver::fill_ghosts(double t) {
  parallel::exchange_halos(states_, partition_);
  parallel::for_each_block(states_.size(), [&](std::size_t b) {
    boundary::apply_boundaries(states_[b], spec_, t, params_, blocks_[b].where, &blocks_[b].stats);
  });
}

void Solver::check_block(std::size_t b, const char* stage) const {
  const State& s = states_[b];
  const auto& where = blocks_[b].where;
  for (int j = 0; j < s.ny; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      const double h = s.h(i, j);
      if (h >= 0.0 && std::isfinite(h) && std::isfinite(s.hu(i, j)) && std::isfinite(s.hv(i, j))) continue;
      const int col = where.col_offset + i;
      const int row = where.global_ny - 1 - (where.row_offset + j);
      const std::string what = std::isfinite(h) && std::isfinite(s.hu(i, j)) && std::isfinite(s.hv(i, j))
                                   ? "negative water depth " + std::to_string(h)
                                   : std::string("non-finite state");
      throw NumericalError(what + " after " + stage, time_, steps_, col, row);
    }
  }
}

StepDiagnostics Solver::step(double dt_cap) {
  if (!(dt_cap > 0.0)) throw Error("step: dt_cap must be > 0");
  const std::size_t nb = states_.size();
  std::size_t fallbacks_before = 0;
  for (const auto& blk : blocks_) fallbacks_before += blk.stats.critical_fallbacks;

  fill_ghosts(time_);

  std::vector<double> partial(nb, 0.0);
  parallel::for_each_block(nb, [&](std::size_t b) { partial[b] = max_wave_speed(states_[b], params_, blocks_[b].where); });
  StepDiagnostics diag;
  diag.max_wave_speed = parallel::global_reduce(partial, parallel::ReduceOp::Max);
  double dt = options_.dt_max;
  if (diag.max_wave_speed > 0.0) {
    dt = params_.cfl * std::min(global_.dx, global_.dy) / diag.max_wave_speed;
    if (!(dt >= options_.dt_min)) {
      throw NumericalError("time step " + std::to_string(dt) + " s fell below dt_min", time_, steps_, -1, -1);
    }
  }
  dt = std::min({dt, options_.dt_max, dt_cap});
  diag.dt_used = dt;

  const bool heun = options_.time_scheme == TimeScheme::Heun;
  const bool magnitude = options_.friction == FrictionCoupling::Magnitude;
  const double h_dry = params_.h_dry;

  in_step_ = true;
  // Stage 1: U1 = U^n + dt L(U^n), friction against U^n.
  parallel::for_each_block(nb, [&](std::size_t b) {
    State& s = states_[b];
    Block& blk = blocks_[b];
    blk.h0 = s.h;
    blk.hu0 = s.hu;
    blk.hv0 = s.hv;
    spatial_residual(s, params_, options_.order, blk.residual, blk.where);
    const Residual& r = blk.residual;
    for (int j = 0; j < s.ny; ++j) {
      for (int i = 0; i < s.nx; ++i) {
        const double h_n = blk.h0(i, j);
        const double hu_n = blk.hu0(i, j);
        const double hv_n = blk.hv0(i, j);
        const double h1 = h_n + dt * r.dh(i, j);
        const double qx_n = magnitude ? std::hypot(hu_n, hv_n) : std::abs(hu_n);
        const double qy_n = magnitude ? qx_n : std::abs(hv_n);
        s.h(i, j) = h1;
        s.hu(i, j) = friction_step(hu_n + dt * r.dhu(i, j), qx_n, h_n, h1, dt, params_);
        s.hv(i, j) = friction_step(hv_n + dt * r.dhv(i, j), qy_n, h_n, h1, dt, params_);
        if (h1 <= h_dry) s.hu(i, j) = s.hv(i, j) = 0.0;
      }
    }
  });
  for (std::size_t b = 0; b < nb; ++b) check_block(b, heun ? "RK stage 1" : "Euler step");

  std::vector<double> in1(nb), out1(nb), in2(nb, 0.0), out2(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    in1[b] = blocks_[b].residual.inflow_rate;
    out1[b] = blocks_[b].residual.outflow_rate;
  }

  if (heun) {
    fill_ghosts(time_ + dt);
    // Stage 2: U2 = U1 + dt L(U1), friction against U1; U^{n+1} = (U^n + U2) / 2.
    parallel::for_each_block(nb, [&](std::size_t b) {
      State& s = states_[b];
      Block& blk = blocks_[b];
      spatial_residual(s, params_, options_.order, blk.residual, blk.where);
      const Residual& r = blk.residual;
      for (int j = 0; j < s.ny; ++j) {
        for (int i = 0; i < s.nx; ++i) {
          const double h1 = s.h(i, j);
          const double hu1 = s.hu(i, j);
          const double hv1 = s.hv(i, j);
          const double h2 = h1 + dt * r.dh(i, j);
          const double qx1 = magnitude ? std::hypot(hu1, hv1) : std::abs(hu1);
          const double qy1 = magnitude ? qx1 : std::abs(hv1);
          const double hu2 = friction_step(hu1 + dt * r.dhu(i, j), qx1, h1, h2, dt, params_);
          const double hv2 = friction_step(hv1 + dt * r.dhv(i, j), qy1, h1, h2, dt, params_);
          const double h = 0.5 * (blk.h0(i, j) + h2);
          s.h(i, j) = h;
          if (h <= h_dry) {
            s.hu(i, j) = s.hv(i, j) = 0.0;
          } else {
            s.hu(i, j) = 0.5 * (blk.hu0(i, j) + hu2);
            s.hv(i, j) = 0.5 * (blk.hv0(i, j) + hv2);
          }
        }
      }
      in2[b] = r.inflow_rate;
      out2[b] = r.outflow_rate;
    });
    for (std::size_t b = 0; b < nb; ++b) check_block(b, "RK stage 2");
  }

  const double w1 = heun ? 0.5 * dt : dt;
  const double w2 = heun ? 0.5 * dt : 0.0;
  diag.inflow_volume = w1 * parallel::global_reduce(in1, parallel::ReduceOp::Sum) +
                       w2 * parallel::global_reduce(in2, parallel::ReduceOp::Sum);
  diag.outflow_volume = w1 * parallel::global_reduce(out1, parallel::ReduceOp::Sum) +
                        w2 * parallel::global_reduce(out2, parallel::ReduceOp::Sum);

  parallel::for_each_block(nb, [&](std::size_t b) {
    const State& s = states_[b];
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j < s.ny; ++j) {
      for (int i = 0; i < s.nx; ++i) {
        if (!s.is_wall(i, j)) m = std::min(m, s.h(i, j));
      }
    }
    partial[b] = m;
  });
  diag.min_h = parallel::global_reduce(partial, parallel::ReduceOp::Min);

  std::size_t fallbacks_after = 0;
  for (const auto& blk : blocks_) fallbacks_after += blk.stats.critical_fallbacks;
  diag.critical_fallbacks = fallbacks_after - fallbacks_before;

  time_ += dt;
  ++steps_;
  in_step_ = false;
  return diag;
}

State Solver::state() const {
  State out = global_;
  parallel::gather(states_, partition_, out);
  return out;
}

State Solver::last_good_state() const {
  if (!in_step_) return state();
  State out = global_;
  for (std::size_t b = 0; b < states_.size(); ++b) {
    const auto& ext = partition_.blocks[b];
    const Block& blk = blocks_[b];
    for (int j = 0; j < ext.rows(); ++j) {
      for (int i = 0; i < ext.cols(); ++i) {
        out.h(ext.col_begin + i, ext.row_begin + j) = blk.h0(i, j);
        out.hu(ext.col_begin + i, ext.row_begin + j) = blk.hu0(i, j);
        out.hv(ext.col_begin + i, ext.row_begin + j) = blk.hv0(i, j);
      }
    }
  }
  return out;
}

double Solver::volume() const {
  std::vector<double> partial(states_.size());
  for (std::size_t b = 0; b < states_.size(); ++b) partial[b] = states_[b].volume();
  return parallel::global_reduce(partial, parallel::ReduceOp::Sum);
}

void Solver::restore(const State& conserved, double time, long steps) {
  if (conserved.nx != global_.nx || conserved.ny != global_.ny) throw ConfigError("restored state has the wrong size");
  for (int j = 0; j < global_.ny; ++j) {
    for (int i = 0; i < global_.nx; ++i) {
      global_.h(i, j) = conserved.h(i, j);
      global_.hu(i, j) = conserved.hu(i, j);
      global_.hv(i, j) = conserved.hv(i, j);
    }
  }
  states_ = parallel::scatter(global_, partition_);
  in_step_ = false;
  time_ = time;
  steps_ = steps;
}

}  // namespace swflood
