#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "swflood/state_grid.hpp"

namespace swflood::boundary {

enum class BoundaryKind { Wall, FreeOutflow, Discharge };

struct EdgeCondition {
  BoundaryKind kind = BoundaryKind::Wall;
  /// Discharge edges only: cells receiving the inflow, as positions along the edge
  /// (i for north/south, j for east/west), sorted and unique.
  std::vector<int> mask;
};

/// Q(t) in m^3/s, shared by every discharge edge.
using DischargeFn = std::function<double(double)>;

struct BoundarySpec {
  std::array<EdgeCondition, 4> edges{};
  DischargeFn discharge;

  EdgeCondition& operator[](Edge e) { return edges[static_cast<std::size_t>(e)]; }
  const EdgeCondition& operator[](Edge e) const { return edges[static_cast<std::size_t>(e)]; }

  /// Throws ConfigError when a discharge edge has an empty or out-of-range mask, a mask is
  /// set on a non-discharge edge, or no discharge function is provided.
  void validate(int nx, int ny) const;

  /// Summed face length of all masked cells, metres.
  double inflow_width(double dx, double dy) const;

  static BoundarySpec walls();
};

/// Ghost state of an imposed-discharge cell.
struct InflowState {
  double h = 0.0;
  double u = 0.0;  ///< along the inward normal
  bool critical_fallback = false;
};

/// Solves u_b h_b = q_b together with u_b - 2 sqrt(g h_b) = u_i - 2 sqrt(g h_i), where u is the
/// velocity along the inward normal. Returns the subcritical root, or the critical state for
/// q_b when the demand cannot be met subcritically.
InflowState riemann_inflow(double h_i, double u_i, double q_b, double g, double h_dry = 1e-10);

/// Where a (block) state sits in the global grid.
struct Placement {
  int col_offset = 0;
  int row_offset = 0;
  int global_nx = 0;
  int global_ny = 0;

  static Placement whole(const State& s) { return {0, 0, s.nx, s.ny}; }
};

struct BoundaryStats {
  std::size_t critical_fallbacks = 0;
};

/// Sets the ghost topography on the physical edges covered by this state. Called once.
void init_ghost_topography(State& state, const BoundarySpec& spec, const Placement& where);

/// Fills h, hu, hv ghosts on the physical edges covered by this state at time t.
void apply_boundaries(State& state, const BoundarySpec& spec, double t, const PhysicalParams& params,
                      const Placement& where, BoundaryStats* stats = nullptr);

/// Riverbed mask file: `row col` raster positions (row 0 = north), `#` comments.
std::vector<std::pair<int, int>> parse_riverbed_mask(std::istream& in);
std::vector<std::pair<int, int>> parse_riverbed_mask_file(const std::filesystem::path& path);

/// Distributes raster mask positions onto the discharge edges of `spec`.
/// Throws ConfigError for a position that lies on no discharge edge.
void assign_mask(BoundarySpec& spec, const std::vector<std::pair<int, int>>& cells, int nrows, int ncols);

}  // namespace swflood::boundary
