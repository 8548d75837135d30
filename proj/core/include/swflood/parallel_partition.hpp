#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "swflood/state_grid.hpp"

namespace swflood::parallel {

/// Half-open interior cell ranges of one block. Rows follow the state's j axis
/// (south to north), columns its i axis (west to east).
struct BlockExtent {
  int row_begin = 0;
  int row_end = 0;
  int col_begin = 0;
  int col_end = 0;

  int rows() const noexcept { return row_end - row_begin; }
  int cols() const noexcept { return col_end - col_begin; }
  friend bool operator==(const BlockExtent&, const BlockExtent&) = default;
};

/// Rectangular tiling of the grid into block_rows x block_cols blocks, stored row-major
/// (block index = block_row * block_cols + block_col, block_row 0 at the south).
struct Partition {
  int nrows = 0;
  int ncols = 0;
  int block_rows = 1;
  int block_cols = 1;
  std::vector<BlockExtent> blocks;

  static constexpr int halo = kGhost;

  std::size_t size() const noexcept { return blocks.size(); }
  std::optional<std::size_t> neighbor(std::size_t block, Edge edge) const;
  /// True when the block's `edge` lies on the domain boundary.
  bool on_domain_edge(std::size_t block, Edge edge) const { return !neighbor(block, edge).has_value(); }
};

/// Near-square tiling minimising block perimeter; block sizes differ by at most one.
/// Throws ConfigError when nblocks is zero, exceeds the cell count, or cannot be laid
/// out with blocks at least `halo` cells wide in every split direction.
Partition partition(int nrows, int ncols, int nblocks);

enum class FieldSet { Conserved, ConservedAndTopography };

/// Copies each block's neighbour interiors into its 2-deep halos: columns first, then rows
/// over the full padded width so corners come from the diagonal neighbour.
/// Blocks must be the per-block states produced by scatter() for this partition.
void exchange_halos(std::span<State> blocks, const Partition& part, FieldSet fields = FieldSet::Conserved);

/// Splits a global state into per-block states; each block copies its padded window
/// (interior plus halo) from the global state.
std::vector<State> scatter(const State& global, const Partition& part);

/// Writes block interiors back into the global state.
void gather(std::span<const State> blocks, const Partition& part, State& global);

enum class ReduceOp { Min, Max, Sum };

/// Min/max are exact; sums use a fixed pairwise tree over the partial order given.
double global_reduce(std::span<const double> partials, ReduceOp op);

/// Runs body(block_index) for every block, in parallel when there is more than one.
template <class Body>
void for_each_block(std::size_t nblocks, Body&& body);

namespace detail {
void run_parallel(std::size_t n, void (*fn)(void*, std::size_t), void* ctx);
}

template <class Body>
void for_each_block(std::size_t nblocks, Body&& body) {
  if (nblocks == 1) {
    body(std::size_t{0});
    return;
  }
  detail::run_parallel(
      nblocks, [](void* ctx, std::size_t b) { (*static_cast<std::remove_reference_t<Body>*>(ctx))(b); },
      static_cast<void*>(&body));
}

}  // namespace swflood::parallel
