#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "helmdef/error.hpp"

namespace helmdef {

/// Physical extents of a rectangle: [x0, x1] x [y0, y1].
struct Extents {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;
};

/// Uniform vertex-centred grid. Indices are 0-based: point (i, j) sits at
/// (x0 + i h, y0 + j h) for 0 <= i < nx, 0 <= j < ny.
struct Grid2D {
  int nx = 0;
  int ny = 0;
  Extents extents;
  double h = 0.0;

  double x(int i) const { return extents.x0 + i * h; }
  double y(int j) const { return extents.y0 + j * h; }
  std::size_t points() const { return static_cast<std::size_t>(nx) * ny; }
  /// Lexicographic index, i fastest.
  std::size_t linear(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  bool coarsenable() const { return nx % 2 == 1 && ny % 2 == 1 && nx >= 5 && ny >= 5; }
  bool on_boundary(int i, int j) const { return i == 0 || j == 0 || i == nx - 1 || j == ny - 1; }
};

Grid2D build_grid(int nx, int ny, const Extents& extents);

/// Standard coarsening h -> 2h; coarse point ic sits on fine point 2 ic.
Grid2D coarsen_grid(const Grid2D& fine);

constexpr int fine_index(int coarse) { return 2 * coarse; }

/// 1-based form of the coarse -> fine correspondence, (ic, jc) -> (2ic - 1, 2jc - 1).
constexpr std::pair<int, int> fine_index_1based(int ic, int jc) { return {2 * ic - 1, 2 * jc - 1}; }

/// Half-open index interval [lo, hi).
struct Range {
  int lo = 0;
  int hi = 0;
  int size() const { return hi - lo; }
  bool contains(int i) const { return i >= lo && i < hi; }
  bool operator==(const Range&) const = default;
};

/// Blockwise Cartesian split of an nx x ny index set over px x py workers.
/// Worker ids are row-major over (px, py): id = wx * py + wy.
class CartesianPartition {
 public:
  CartesianPartition() = default;
  CartesianPartition(std::vector<Range> xranges, std::vector<Range> yranges);

  int px() const { return static_cast<int>(xr_.size()); }
  int py() const { return static_cast<int>(yr_.size()); }
  int workers() const { return px() * py(); }
  int worker_id(int wx, int wy) const { return wx * py() + wy; }
  std::pair<int, int> worker_coords(int id) const { return {id / py(), id % py()}; }

  const Range& xrange(int wx) const { return xr_[wx]; }
  const Range& yrange(int wy) const { return yr_[wy]; }
  const std::vector<Range>& xranges() const { return xr_; }
  const std::vector<Range>& yranges() const { return yr_; }

  int owner_x(int i) const;
  int owner_y(int j) const;
  int owner(int i, int j) const { return worker_id(owner_x(i), owner_y(j)); }

  /// Partition induced on the 2h grid: a worker owns coarse point ic iff it
  /// owns fine point 2 ic. Returns false if some worker would own nothing.
  CartesianPartition coarsened() const;

  /// Smallest owned extent over all workers, per direction.
  std::pair<int, int> min_block() const;

 private:
  std::vector<Range> xr_;
  std::vector<Range> yr_;
};

/// Balanced split of [0, n) into p ranges; larger ranges come first.
std::vector<Range> balanced_split(int n, int p);

CartesianPartition partition(const Grid2D& grid, int px, int py);

/// Storage plan for one (grid, partition, halo width) combination: every
/// worker owns a local array with `halo` extra layers on each side.
class Layout {
 public:
  struct Block {
    int id = 0;
    Range xr;
    Range yr;
    int nx = 0;   // owned points
    int ny = 0;
    int ld = 0;   // leading dimension including halo
    std::size_t offset = 0;  // of local (-halo, -halo)
    std::size_t size = 0;
  };

  struct CopyRun {
    int src_block;
    std::size_t src;  // absolute storage index
    std::size_t dst;
    int len;
  };

  Layout(Grid2D grid, CartesianPartition part, int halo);

  const Grid2D& grid() const { return grid_; }
  const CartesianPartition& partition() const { return part_; }
  int halo() const { return halo_; }
  int blocks() const { return static_cast<int>(blocks_.size()); }
  const Block& block(int b) const { return blocks_[b]; }
  std::size_t storage_size() const { return storage_; }

  /// Absolute storage index of local point (li, lj) of block b; local
  /// (0, 0) is the first owned point, halos are at negative / >= n indices.
  std::size_t index(int b, int li, int lj) const {
    const Block& B = blocks_[b];
    return B.offset + static_cast<std::size_t>(li + halo_) +
           static_cast<std::size_t>(lj + halo_) * static_cast<std::size_t>(B.ld);
  }
  /// Storage index of the owned copy of global point (i, j).
  std::size_t owned_index(int i, int j) const;

  const std::vector<CopyRun>& halo_plan() const { return plan_; }

 private:
  Grid2D grid_;
  CartesianPartition part_;
  int halo_;
  std::vector<Block> blocks_;
  std::size_t storage_ = 0;
  std::vector<CopyRun> plan_;
};

using LayoutPtr = std::shared_ptr<const Layout>;

LayoutPtr make_layout(const Grid2D& grid, const CartesianPartition& part, int halo);

/// Runs fn(b) for every block; blocks execute concurrently when more than
/// one thread is available. Work inside a block must only touch that block.
template <class Fn>
void for_each_block(const Layout& layout, Fn&& fn) {
  const int nb = layout.blocks();
#pragma omp parallel for schedule(static) if (nb > 1 && layout.grid().points() > 20000)
  for (int b = 0; b < nb; ++b) fn(b);
}

}  // namespace helmdef
