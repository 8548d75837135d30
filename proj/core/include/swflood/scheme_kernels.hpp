#pragma once

// One-dimensional building blocks of the well-balanced scheme. The 2D solver applies
// them direction by direction; every function is pure and branch-light so the solver
// can call them per interface.

#include <algorithm>
#include <cmath>

namespace swflood::kernels {

inline double minmod(double a, double b) {
  if (a >= 0.0 && b >= 0.0) return std::min(a, b);
  if (a <= 0.0 && b <= 0.0) return std::max(a, b);
  return 0.0;
}

/// Values at the two faces of one cell: `minus` at i-1/2 (left face), `plus` at i+1/2.
struct Traces {
  double minus = 0.0;
  double plus = 0.0;
};

/// Limited slope Ds_i of a scalar from its two neighbours.
inline double limited_slope(double prev, double cur, double next, double dx) {
  return minmod((cur - prev) / dx, (next - cur) / dx);
}

inline Traces muscl_reconstruct(double prev, double cur, double next, double dx) {
  const double half = 0.5 * dx * limited_slope(prev, cur, next, dx);
  return {cur - half, cur + half};
}

/// Velocity traces that keep h_{i-1/2+} u_{i-1/2+} + h_{i+1/2-} u_{i+1/2-} = 2 h_i u_i.
/// `h_traces` are the depth traces of the same cell. The caller passes du = 0 for dry cells.
inline Traces velocity_reconstruct(double u, double h, Traces h_traces, double du, double dx) {
  if (du == 0.0) return {u, u};
  const double half = 0.5 * dx * du;
  return {u - h_traces.plus / h * half, u + h_traces.minus / h * half};
}

/// Reconstructed values on one side of an interface.
struct SideTrace {
  double h = 0.0;
  double z = 0.0;
  double u = 0.0;  ///< normal velocity
  double v = 0.0;  ///< transverse velocity
};

/// Interface states after the hydrostatic reconstruction.
struct InterfaceStates {
  double hL = 0.0;
  double hR = 0.0;
  double uL = 0.0;
  double uR = 0.0;
  double vL = 0.0;
  double vR = 0.0;
  double h_minus = 0.0;  ///< left MUSCL trace before the reconstruction
  double h_plus = 0.0;   ///< right MUSCL trace before the reconstruction
  double z_minus = 0.0;
  double z_plus = 0.0;
};

/// `left` is the trace h_{i+1/2-} of cell i, `right` the trace h_{i+1/2+} of cell i+1.
inline InterfaceStates hydrostatic_reconstruct(const SideTrace& left, const SideTrace& right) {
  const double z_star = std::max(left.z, right.z);
  InterfaceStates s;
  // (h + z) - z* can overshoot h by an ulp; the side already at z* keeps its trace exactly.
  s.hL = left.z == z_star ? left.h : std::clamp(left.h + left.z - z_star, 0.0, left.h);
  s.hR = right.z == z_star ? right.h : std::clamp(right.h + right.z - z_star, 0.0, right.h);
  s.uL = left.u;
  s.uR = right.u;
  s.vL = left.v;
  s.vR = right.v;
  s.h_minus = left.h;
  s.h_plus = right.h;
  s.z_minus = left.z;
  s.z_plus = right.z;
  return s;
}

struct NumericalFlux {
  double f_h = 0.0;
  double f_hu = 0.0;
  double f_hv = 0.0;
};

/// HLL wave-speed bounds (c1 <= c2) for the pair of states.
struct WaveSpeeds {
  double c1 = 0.0;
  double c2 = 0.0;
};

inline WaveSpeeds hll_wave_speeds(double hL, double uL, double hR, double uR, double g) {
  const double cL = std::sqrt(g * hL);
  const double cR = std::sqrt(g * hR);
  return {std::min(uL - cL, uR - cR), std::max(uL + cL, uR + cR)};
}

inline NumericalFlux hll_flux(double hL, double uL, double hR, double uR, double g) {
  if (hL <= 0.0 && hR <= 0.0) return {};
  const auto [c1, c2] = hll_wave_speeds(hL, uL, hR, uR, g);
  const double qL = hL * uL;
  const double qR = hR * uR;
  const double fL_hu = qL * uL + 0.5 * g * hL * hL;
  const double fR_hu = qR * uR + 0.5 * g * hR * hR;
  if (c1 >= 0.0) return {qL, fL_hu, 0.0};
  if (c2 <= 0.0) return {qR, fR_hu, 0.0};
  const double inv = 1.0 / (c2 - c1);
  return {(c2 * qL - c1 * qR + c1 * c2 * (hR - hL)) * inv,
          (c2 * fL_hu - c1 * fR_hu + c1 * c2 * (qR - qL)) * inv, 0.0};
}

/// Contact speed estimate used to upwind the transverse velocity; 0 for a vanishing denominator.
inline double hllc_contact_speed(double hL, double uL, double hR, double uR, double c1, double c2) {
  const double denom = hR * (uR - c2) - hL * (uL - c1);
  if (denom == 0.0) return 0.0;
  return (c1 * hR * (uR - c2) - c2 * hL * (uL - c1)) / denom;
}

/// HLL for (h, hu) plus the transverse momentum flux upwinded by the contact speed.
inline NumericalFlux hllc_flux(double hL, double uL, double vL, double hR, double uR, double vR, double g) {
  NumericalFlux f = hll_flux(hL, uL, hR, uR, g);
  if (f.f_h == 0.0) return f;
  const auto [c1, c2] = hll_wave_speeds(hL, uL, hR, uR, g);
  const double c_star = hllc_contact_speed(hL, uL, hR, uR, c1, c2);
  f.f_hv = f.f_h * (c_star >= 0.0 ? vL : vR);
  return f;
}

/// Momentum corrections added to the interface flux on each side (mass components are zero).
struct InterfaceSources {
  double left = 0.0;   ///< goes with F_{i+1/2L}, seen by the cell on the left
  double right = 0.0;  ///< goes with F_{i+1/2R}, seen by the cell on the right
};

inline InterfaceSources interface_sources(double h_minus, double h_plus, double hL, double hR, double g) {
  return {0.5 * g * (h_minus * h_minus - hL * hL), 0.5 * g * (h_plus * h_plus - hR * hR)};
}

/// Cell-centred topography source for the normal momentum.
inline double centered_source(double h_left_trace, double h_right_trace, double z_left_trace,
                              double z_right_trace, double g) {
  return -g * 0.5 * (h_left_trace + h_right_trace) * (z_right_trace - z_left_trace);
}

}  // namespace swflood::kernels
