#include "swflood/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "swflood/errors.hpp"

namespace swflood::boundary {

namespace {

constexpr std::array<Edge, 4> kEdges = {Edge::North, Edge::South, Edge::East, Edge::West};

const char* edge_name(Edge e) {
  switch (e) {
    case Edge::North: return "north";
    case Edge::South: return "south";
    case Edge::East: return "east";
    case Edge::West: return "west";
  }
  return "?";
}

bool is_x_edge(Edge e) { return e == Edge::East || e == Edge::West; }

// Layer p of an edge: p >= 0 counts interior cells inward from the edge, p < 0 ghost layers outward.
struct EdgeFrame {
  Edge edge;
  int nx;
  int ny;

  int along_count() const { return is_x_edge(edge) ? ny : nx; }
  int depth_count() const { return is_x_edge(edge) ? nx : ny; }
  double sign() const { return edge == Edge::West || edge == Edge::South ? 1.0 : -1.0; }

  std::pair<int, int> cell(int p, int s) const {
    switch (edge) {
      case Edge::West: return {p, s};
      case Edge::East: return {nx - 1 - p, s};
      case Edge::South: return {s, p};
      case Edge::North: return {s, ny - 1 - p};
    }
    return {0, 0};
  }
};

bool on_physical_edge(const State& s, Edge e, const Placement& w) {
  switch (e) {
    case Edge::West: return w.col_offset == 0;
    case Edge::East: return w.col_offset + s.nx == w.global_nx;
    case Edge::South: return w.row_offset == 0;
    case Edge::North: return w.row_offset + s.ny == w.global_ny;
  }
  return false;
}

int global_along(Edge e, int s, const Placement& w) { return s + (is_x_edge(e) ? w.row_offset : w.col_offset); }

bool in_mask(const std::vector<int>& mask, int s) { return std::binary_search(mask.begin(), mask.end(), s); }

}  // namespace

void BoundarySpec::validate(int nx, int ny) const {
  bool has_discharge = false;
  for (Edge e : kEdges) {
    const auto& c = (*this)[e];
    const int len = is_x_edge(e) ? ny : nx;
    if (c.kind == BoundaryKind::Discharge) {
      has_discharge = true;
      if (c.mask.empty()) throw ConfigError(std::string("discharge edge '") + edge_name(e) + "' has an empty riverbed mask");
      if (!std::is_sorted(c.mask.begin(), c.mask.end()) ||
          std::adjacent_find(c.mask.begin(), c.mask.end()) != c.mask.end()) {
        throw ConfigError(std::string("riverbed mask on '") + edge_name(e) + "' must be sorted and unique");
      }
      if (c.mask.front() < 0 || c.mask.back() >= len) {
        throw ConfigError(std::string("riverbed mask on '") + edge_name(e) + "' leaves the edge");
      }
    } else if (!c.mask.empty()) {
      throw ConfigError(std::string("riverbed mask given for non-discharge edge '") + edge_name(e) + "'");
    }
  }
  if (has_discharge && !discharge) throw ConfigError("discharge edge configured without a discharge function");
}

double BoundarySpec::inflow_width(double dx, double dy) const {
  double width = 0.0;
  for (Edge e : kEdges) {
    const auto& c = (*this)[e];
    if (c.kind == BoundaryKind::Discharge) width += static_cast<double>(c.mask.size()) * (is_x_edge(e) ? dy : dx);
  }
  return width;
}

BoundarySpec BoundarySpec::walls() { return BoundarySpec{}; }

InflowState riemann_inflow(double h_i, double u_i, double q_b, double g, double h_dry) {
  const bool wet = h_i > h_dry;
  const double c_i = wet ? std::sqrt(g * h_i) : 0.0;
  const double u_in = wet ? u_i : 0.0;
  const double invariant = u_in - 2.0 * c_i;

  if (q_b <= 0.0) {
    if (wet && u_in == 0.0) return {h_i, 0.0, false};
    // u_b = 0: 2 sqrt(g h_b) = -invariant
    const double c_b = -0.5 * invariant;
    if (c_b <= 0.0) return {0.0, 0.0, true};
    return {c_b * c_b / g, 0.0, false};
  }

  const double h_crit = std::cbrt(q_b * q_b / g);
  const double c_crit = std::sqrt(g * h_crit);
  // f decreases monotonically in h; a subcritical root exists iff f(h_crit) >= 0.
  auto f = [&](double h) { return q_b / h - 2.0 * std::sqrt(g * h) - invariant; };
  auto df = [&](double h) { return -q_b / (h * h) - std::sqrt(g / h); };
  if (-c_crit - invariant < 0.0) return {h_crit, q_b / h_crit, true};

  double lo = h_crit;
  double hi = std::max(2.0 * h_crit, h_i);
  while (f(hi) > 0.0) hi *= 2.0;

  double h = std::clamp(h_i, lo, hi);
  for (int iter = 0; iter < 100; ++iter) {
    const double fh = f(h);
    if (std::abs(fh) <= 1e-12) break;
    if (fh > 0.0) {
      lo = h;
    } else {
      hi = h;
    }
    double next = h - fh / df(h);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == h) break;
    h = next;
  }
  return {h, q_b / h, false};
}

void init_ghost_topography(State& state, const BoundarySpec& spec, const Placement& where) {
  for (Edge e : kEdges) {
    if (!on_physical_edge(state, e, where)) continue;
    const EdgeFrame frame{e, state.nx, state.ny};
    const auto& cond = spec[e];
    const int depth = frame.depth_count();
    for (int s = 0; s < frame.along_count(); ++s) {
      const bool copy = cond.kind == BoundaryKind::FreeOutflow ||
                        (cond.kind == BoundaryKind::Discharge && in_mask(cond.mask, global_along(e, s, where)));
      for (int k = 1; k <= kGhost; ++k) {
        const auto [gi, gj] = frame.cell(-k, s);
        const auto [ii, ij] = frame.cell(copy ? 0 : std::min(k - 1, depth - 1), s);
        state.z(gi, gj) = state.z(ii, ij);
      }
    }
  }
}

void apply_boundaries(State& state, const BoundarySpec& spec, double t, const PhysicalParams& params,
                      const Placement& where, BoundaryStats* stats) {
  double q_b = 0.0;
  bool q_ready = false;
  for (Edge e : kEdges) {
    if (!on_physical_edge(state, e, where)) continue;
    const EdgeFrame frame{e, state.nx, state.ny};
    const auto& cond = spec[e];
    Field2D& normal = is_x_edge(e) ? state.hu : state.hv;
    Field2D& tangential = is_x_edge(e) ? state.hv : state.hu;
    const double sign = frame.sign();
    const int depth = frame.depth_count();

    if (cond.kind == BoundaryKind::Discharge && !q_ready) {
      const double width = spec.inflow_width(state.dx, state.dy);
      q_b = std::max(spec.discharge(t), 0.0) / width;
      q_ready = true;
    }

    for (int s = 0; s < frame.along_count(); ++s) {
      const bool inflow = cond.kind == BoundaryKind::Discharge && in_mask(cond.mask, global_along(e, s, where));
      if (inflow) {
        const auto [ii, ij] = frame.cell(0, s);
        const double h_i = state.h(ii, ij);
        const double u_i = velocity(h_i, sign * normal(ii, ij), params.h_dry);
        const InflowState b = riemann_inflow(h_i, u_i, q_b, params.g, params.h_dry);
        if (b.critical_fallback && stats) ++stats->critical_fallbacks;
        for (int k = 1; k <= kGhost; ++k) {
          const auto [gi, gj] = frame.cell(-k, s);
          state.h(gi, gj) = b.h;
          normal(gi, gj) = b.h > 0.0 ? sign * q_b : 0.0;
          tangential(gi, gj) = 0.0;
        }
        continue;
      }
      const bool outflow = cond.kind == BoundaryKind::FreeOutflow;
      for (int k = 1; k <= kGhost; ++k) {
        const auto [gi, gj] = frame.cell(-k, s);
        const auto [ii, ij] = frame.cell(outflow ? 0 : std::min(k - 1, depth - 1), s);
        state.h(gi, gj) = state.h(ii, ij);
        normal(gi, gj) = outflow ? normal(ii, ij) : -normal(ii, ij);
        tangential(gi, gj) = tangential(ii, ij);
      }
    }
  }
}

std::vector<std::pair<int, int>> parse_riverbed_mask(std::istream& in) {
  std::vector<std::pair<int, int>> cells;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    int row = 0;
    int col = 0;
    if (!(ls >> row)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError("expected 'row col'", line_no);
    }
    std::string rest;
    if (!(ls >> col) || (ls >> rest)) throw ParseError("expected 'row col'", line_no);
    if (row < 0 || col < 0) throw ParseError("negative mask position", line_no);
    cells.emplace_back(row, col);
  }
  return cells;
}

std::vector<std::pair<int, int>> parse_riverbed_mask_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open riverbed mask '" + path.string() + "'");
  try {
    return parse_riverbed_mask(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

void assign_mask(BoundarySpec& spec, const std::vector<std::pair<int, int>>& cells, int nrows, int ncols) {
  for (Edge e : kEdges) spec[e].mask.clear();
  for (const auto& [row, col] : cells) {
    if (row >= nrows || col >= ncols) {
      throw ConfigError("riverbed mask cell (" + std::to_string(row) + ", " + std::to_string(col) + ") is outside the grid");
    }
    bool placed = false;
    for (Edge e : kEdges) {
      auto& c = spec[e];
      if (c.kind != BoundaryKind::Discharge) continue;
      const bool on_edge = (e == Edge::North && row == 0) || (e == Edge::South && row == nrows - 1) ||
                           (e == Edge::West && col == 0) || (e == Edge::East && col == ncols - 1);
      if (!on_edge) continue;
      c.mask.push_back(is_x_edge(e) ? nrows - 1 - row : col);
      placed = true;
      break;
    }
    if (!placed) {
      throw ConfigError("riverbed mask cell (" + std::to_string(row) + ", " + std::to_string(col) +
                        ") does not lie on a discharge edge");
    }
  }
  for (Edge e : kEdges) {
    auto& m = spec[e].mask;
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
  }
}

}  // namespace swflood::boundary
