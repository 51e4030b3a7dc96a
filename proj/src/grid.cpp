#include "helmdef/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace helmdef {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::AnisotropicSpacing: return "AnisotropicSpacing";
    case ErrorKind::DegenerateDomain: return "DegenerateDomain";
    case ErrorKind::TooManyWorkers: return "TooManyWorkers";
    case ErrorKind::NotCoarsenable: return "NotCoarsenable";
    case ErrorKind::NonPositiveK: return "NonPositiveK";
    case ErrorKind::UncoveredRegion: return "UncoveredRegion";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MalformedFile: return "MalformedFile";
    case ErrorKind::NonPositiveVelocity: return "NonPositiveVelocity";
    case ErrorKind::LocationOutsideDomain: return "LocationOutsideDomain";
    case ErrorKind::GridTooLarge: return "GridTooLarge";
    case ErrorKind::StaleHalo: return "StaleHalo";
    case ErrorKind::ZeroDiagonal: return "ZeroDiagonal";
    case ErrorKind::IncompatibleFootprints: return "IncompatibleFootprints";
    case ErrorKind::MissingFineContext: return "MissingFineContext";
    case ErrorKind::CompositionMismatch: return "CompositionMismatch";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::InfeasiblePartition: return "InfeasiblePartition";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Grid2D build_grid(int nx, int ny, const Extents& e) {
  if (nx < 3 || ny < 3) {
    throw Error(ErrorKind::DegenerateDomain, "need at least 3 points per direction");
  }
  const double lx = e.x1 - e.x0;
  const double ly = e.y1 - e.y0;
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    throw Error(ErrorKind::DegenerateDomain, "extents collapse");
  }
  const double hx = lx / (nx - 1);
  const double hy = ly / (ny - 1);
  if (std::abs(hx - hy) > 1e-10 * std::max(hx, hy)) {
    throw Error(ErrorKind::AnisotropicSpacing,
                "hx=" + std::to_string(hx) + " hy=" + std::to_string(hy));
  }
  Grid2D g;
  g.nx = nx;
  g.ny = ny;
  g.extents = e;
  g.h = hx;
  return g;
}

Grid2D coarsen_grid(const Grid2D& fine) {
  if (fine.nx % 2 == 0 || fine.ny % 2 == 0) {
    throw Error(ErrorKind::NotCoarsenable, "point counts must be odd");
  }
  if (fine.nx < 5 || fine.ny < 5) {
    throw Error(ErrorKind::NotCoarsenable, "coarse grid would have fewer than 3 points");
  }
  Grid2D c = fine;
  c.nx = (fine.nx + 1) / 2;
  c.ny = (fine.ny + 1) / 2;
  c.h = 2.0 * fine.h;
  return c;
}

std::vector<Range> balanced_split(int n, int p) {
  std::vector<Range> out;
  out.reserve(p);
  const int base = n / p;
  const int extra = n % p;
  int lo = 0;
  for (int w = 0; w < p; ++w) {
    const int len = base + (w < extra ? 1 : 0);
    out.push_back({lo, lo + len});
    lo += len;
  }
  return out;
}

CartesianPartition::CartesianPartition(std::vector<Range> xranges, std::vector<Range> yranges)
    : xr_(std::move(xranges)), yr_(std::move(yranges)) {}

namespace {
int find_owner(const std::vector<Range>& rs, int i) {
  auto it = std::upper_bound(rs.begin(), rs.end(), i,
                             [](int v, const Range& r) { return v < r.hi; });
  return static_cast<int>(it - rs.begin());
}

std::vector<Range> coarsen_ranges(const std::vector<Range>& rs) {
  // coarse ic owned iff 2 ic in [lo, hi)  <=>  ic in [ceil(lo/2), ceil(hi/2))
  std::vector<Range> out;
  out.reserve(rs.size());
  for (const Range& r : rs) out.push_back({(r.lo + 1) / 2, (r.hi + 1) / 2});
  return out;
}
}  // namespace

int CartesianPartition::owner_x(int i) const { return find_owner(xr_, i); }
int CartesianPartition::owner_y(int j) const { return find_owner(yr_, j); }

CartesianPartition CartesianPartition::coarsened() const {
  return CartesianPartition(coarsen_ranges(xr_), coarsen_ranges(yr_));
}

std::pair<int, int> CartesianPartition::min_block() const {
  int mx = 1 << 30;
  int my = 1 << 30;
  for (const Range& r : xr_) mx = std::min(mx, r.size());
  for (const Range& r : yr_) my = std::min(my, r.size());
  return {mx, my};
}

CartesianPartition partition(const Grid2D& grid, int px, int py) {
  if (px < 1 || py < 1 || px > grid.nx || py > grid.ny) {
    throw Error(ErrorKind::TooManyWorkers, std::to_string(px) + "x" + std::to_string(py) +
                                               " workers for a " + std::to_string(grid.nx) +
                                               "x" + std::to_string(grid.ny) + " grid");
  }
  return CartesianPartition(balanced_split(grid.nx, px), balanced_split(grid.ny, py));
}

Layout::Layout(Grid2D grid, CartesianPartition part, int halo)
    : grid_(grid), part_(std::move(part)), halo_(halo) {
  const int nb = part_.workers();
  blocks_.resize(nb);
  std::size_t off = 0;
  for (int b = 0; b < nb; ++b) {
    auto [wx, wy] = part_.worker_coords(b);
    Block& B = blocks_[b];
    B.id = b;
    B.xr = part_.xrange(wx);
    B.yr = part_.yrange(wy);
    B.nx = B.xr.size();
    B.ny = B.yr.size();
    if (B.nx <= 0 || B.ny <= 0) {
      throw Error(ErrorKind::InfeasiblePartition, "worker " + std::to_string(b) + " owns no points");
    }
    B.ld = B.nx + 2 * halo_;
    B.offset = off;
    B.size = static_cast<std::size_t>(B.ld) * (B.ny + 2 * halo_);
    off += B.size;
  }
  storage_ = off;

  // Halo plan: every halo cell inside the physical domain copies from the
  // worker owning that global point. Runs are contiguous in i.
  for (int b = 0; b < nb; ++b) {
    const Block& B = blocks_[b];
    for (int lj = -halo_; lj < B.ny + halo_; ++lj) {
      const int gj = B.yr.lo + lj;
      if (gj < 0 || gj >= grid_.ny) continue;
      const int wy = part_.owner_y(gj);
      int li = -halo_;
      while (li < B.nx + halo_) {
        const int gi = B.xr.lo + li;
        const bool halo_cell = li < 0 || li >= B.nx || lj < 0 || lj >= B.ny;
        if (gi < 0 || gi >= grid_.nx || !halo_cell) {
          ++li;
          continue;
        }
        const int wx = part_.owner_x(gi);
        const int src = part_.worker_id(wx, wy);
        const Block& S = blocks_[src];
        // extend while same owner and still a halo cell
        int len = 1;
        while (li + len < B.nx + halo_) {
          const int li2 = li + len;
          const int gi2 = B.xr.lo + li2;
          const bool halo2 = li2 < 0 || li2 >= B.nx || lj < 0 || lj >= B.ny;
          if (!halo2 || gi2 >= grid_.nx || part_.owner_x(gi2) != wx) break;
          ++len;
        }
        plan_.push_back({src, index(src, gi - S.xr.lo, gj - S.yr.lo), index(b, li, lj), len});
        li += len;
      }
    }
  }
}

std::size_t Layout::owned_index(int i, int j) const {
  const int b = part_.owner(i, j);
  const Block& B = blocks_[b];
  return index(b, i - B.xr.lo, j - B.yr.lo);
}

LayoutPtr make_layout(const Grid2D& grid, const CartesianPartition& part, int halo) {
  return std::make_shared<const Layout>(grid, part, halo);
}

}  // namespace helmdef
