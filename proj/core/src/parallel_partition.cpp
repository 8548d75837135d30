#include "swflood/parallel_partition.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <string>

#include <tbb/parallel_for.h>

#include "swflood/errors.hpp"

namespace swflood::parallel {

namespace {

std::vector<int> split_sizes(int n, int parts) {
  std::vector<int> bounds(static_cast<std::size_t>(parts) + 1, 0);
  const int base = n / parts;
  const int extra = n % parts;
  for (int k = 0; k < parts; ++k) bounds[k + 1] = bounds[k] + base + (k < extra ? 1 : 0);
  return bounds;
}

}  // namespace

std::optional<std::size_t> Partition::neighbor(std::size_t block, Edge edge) const {
  const int br = static_cast<int>(block) / block_cols;
  const int bc = static_cast<int>(block) % block_cols;
  int nr = br;
  int nc = bc;
  switch (edge) {
    case Edge::North: ++nr; break;
    case Edge::South: --nr; break;
    case Edge::East: ++nc; break;
    case Edge::West: --nc; break;
  }
  if (nr < 0 || nc < 0 || nr >= block_rows || nc >= block_cols) return std::nullopt;
  return static_cast<std::size_t>(nr * block_cols + nc);
}

Partition partition(int nrows, int ncols, int nblocks) {
  if (nrows < 1 || ncols < 1) throw ConfigError("cannot partition an empty grid");
  if (nblocks < 1) throw ConfigError("block count must be >= 1");
  if (static_cast<long long>(nblocks) > static_cast<long long>(nrows) * ncols) {
    throw ConfigError("block count " + std::to_string(nblocks) + " exceeds the cell count");
  }

  int best_rows = 0;
  double best_perimeter = std::numeric_limits<double>::infinity();
  for (int br = 1; br <= nblocks; ++br) {
    if (nblocks % br != 0) continue;
    const int bc = nblocks / br;
    if (br > 1 && nrows / br < Partition::halo) continue;
    if (bc > 1 && ncols / bc < Partition::halo) continue;
    if (br > nrows || bc > ncols) continue;
    const double perimeter = static_cast<double>(nrows) / br + static_cast<double>(ncols) / bc;
    if (perimeter < best_perimeter) {
      best_perimeter = perimeter;
      best_rows = br;
    }
  }
  if (best_rows == 0) {
    throw ConfigError("no tiling of a " + std::to_string(nrows) + "x" + std::to_string(ncols) + " grid into " +
                      std::to_string(nblocks) + " blocks keeps every block at least " +
                      std::to_string(Partition::halo) + " cells wide");
  }

  Partition p;
  p.nrows = nrows;
  p.ncols = ncols;
  p.block_rows = best_rows;
  p.block_cols = nblocks / best_rows;
  const auto rb = split_sizes(nrows, p.block_rows);
  const auto cb = split_sizes(ncols, p.block_cols);
  for (int r = 0; r < p.block_rows; ++r) {
    for (int c = 0; c < p.block_cols; ++c) p.blocks.push_back({rb[r], rb[r + 1], cb[c], cb[c + 1]});
  }
  return p;
}

namespace {

std::array<Field2D*, 4> fields_of(State& s, FieldSet set) {
  return {&s.h, &s.hu, &s.hv, set == FieldSet::ConservedAndTopography ? &s.z : nullptr};
}

void check_topology(std::span<State> blocks, const Partition& part) {
  if (blocks.size() != part.size()) throw Error("halo exchange: block count does not match the partition");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].nx != part.blocks[b].cols() || blocks[b].ny != part.blocks[b].rows()) {
      throw Error("halo exchange: block " + std::to_string(b) + " does not match its extent");
    }
  }
}

}  // namespace

void exchange_halos(std::span<State> blocks, const Partition& part, FieldSet set) {
  check_topology(blocks, part);
  if (blocks.size() == 1) return;
  constexpr int H = Partition::halo;

  // Phase 1: west/east halos over interior rows.
  for_each_block(blocks.size(), [&](std::size_t b) {
    State& self = blocks[b];
    auto mine = fields_of(self, set);
    if (auto w = part.neighbor(b, Edge::West)) {
      auto theirs = fields_of(blocks[*w], set);
      const int wnx = blocks[*w].nx;
      for (std::size_t f = 0; f < mine.size(); ++f) {
        if (!mine[f]) continue;
        for (int j = 0; j < self.ny; ++j) {
          for (int k = 1; k <= H; ++k) (*mine[f])(-k, j) = (*theirs[f])(wnx - k, j);
        }
      }
    }
    if (auto e = part.neighbor(b, Edge::East)) {
      auto theirs = fields_of(blocks[*e], set);
      for (std::size_t f = 0; f < mine.size(); ++f) {
        if (!mine[f]) continue;
        for (int j = 0; j < self.ny; ++j) {
          for (int k = 0; k < H; ++k) (*mine[f])(self.nx + k, j) = (*theirs[f])(k, j);
        }
      }
    }
  });

  // Phase 2: south/north halos over the padded width, corners included.
  for_each_block(blocks.size(), [&](std::size_t b) {
    State& self = blocks[b];
    auto mine = fields_of(self, set);
    if (auto s = part.neighbor(b, Edge::South)) {
      auto theirs = fields_of(blocks[*s], set);
      const int sny = blocks[*s].ny;
      for (std::size_t f = 0; f < mine.size(); ++f) {
        if (!mine[f]) continue;
        for (int k = 1; k <= H; ++k) {
          for (int i = -H; i < self.nx + H; ++i) (*mine[f])(i, -k) = (*theirs[f])(i, sny - k);
        }
      }
    }
    if (auto n = part.neighbor(b, Edge::North)) {
      auto theirs = fields_of(blocks[*n], set);
      for (std::size_t f = 0; f < mine.size(); ++f) {
        if (!mine[f]) continue;
        for (int k = 0; k < H; ++k) {
          for (int i = -H; i < self.nx + H; ++i) (*mine[f])(i, self.ny + k) = (*theirs[f])(i, k);
        }
      }
    }
  });
}

std::vector<State> scatter(const State& global, const Partition& part) {
  if (global.nx != part.ncols || global.ny != part.nrows) throw Error("scatter: partition does not match the state");
  constexpr int H = Partition::halo;
  std::vector<State> blocks;
  blocks.reserve(part.size());
  for (const auto& ext : part.blocks) {
    State s(ext.cols(), ext.rows(), global.dx, global.dy);
    for (int j = -H; j < s.ny + H; ++j) {
      for (int i = -H; i < s.nx + H; ++i) {
        const int gi = ext.col_begin + i;
        const int gj = ext.row_begin + j;
        if (gi < -H || gj < -H || gi >= global.nx + H || gj >= global.ny + H) continue;
        s.h(i, j) = global.h(gi, gj);
        s.hu(i, j) = global.hu(gi, gj);
        s.hv(i, j) = global.hv(gi, gj);
        s.z(i, j) = global.z(gi, gj);
      }
    }
    if (!global.wall.empty()) {
      s.wall.assign(static_cast<std::size_t>(s.nx) * s.ny, 0);
      for (int j = 0; j < s.ny; ++j) {
        for (int i = 0; i < s.nx; ++i) {
          s.wall[static_cast<std::size_t>(j) * s.nx + i] = global.is_wall(ext.col_begin + i, ext.row_begin + j);
        }
      }
    }
    blocks.push_back(std::move(s));
  }
  return blocks;
}

void gather(std::span<const State> blocks, const Partition& part, State& global) {
  if (blocks.size() != part.size()) throw Error("gather: block count does not match the partition");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& ext = part.blocks[b];
    const State& s = blocks[b];
    for (int j = 0; j < s.ny; ++j) {
      for (int i = 0; i < s.nx; ++i) {
        global.h(ext.col_begin + i, ext.row_begin + j) = s.h(i, j);
        global.hu(ext.col_begin + i, ext.row_begin + j) = s.hu(i, j);
        global.hv(ext.col_begin + i, ext.row_begin + j) = s.hv(i, j);
      }
    }
  }
}

namespace {

double tree_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() == 1) return v[0];
  const std::size_t mid = v.size() / 2;
  return tree_sum(v.first(mid)) + tree_sum(v.subspan(mid));
}

}  // namespace

double global_reduce(std::span<const double> partials, ReduceOp op) {
  switch (op) {
    case ReduceOp::Min:
      return partials.empty() ? std::numeric_limits<double>::infinity()
                              : *std::min_element(partials.begin(), partials.end());
    case ReduceOp::Max:
      return partials.empty() ? -std::numeric_limits<double>::infinity()
                              : *std::max_element(partials.begin(), partials.end());
    case ReduceOp::Sum:
      return tree_sum(partials);
  }
  return 0.0;
}

namespace detail {

void run_parallel(std::size_t n, void (*fn)(void*, std::size_t), void* ctx) {
  tbb::parallel_for(std::size_t{0}, n, [&](std::size_t b) { fn(ctx, b); });
}

}  // namespace detail

}  // namespace swflood::parallel
