#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "helmdef/error.hpp"

namespace helmdef {

/// Dense rectangular stencil with odd extents; entry (dx, dy) with
/// -rx <= dx <= rx multiplies u(i + dx, j + dy).
template <class T>
struct StencilT {
  int rx = 0;
  int ry = 0;
  std::vector<T> c;

  StencilT() = default;
  StencilT(int rx_, int ry_) : rx(rx_), ry(ry_), c(static_cast<std::size_t>((2 * rx_ + 1) * (2 * ry_ + 1)), T{}) {}

  int width() const { return 2 * rx + 1; }
  int height() const { return 2 * ry + 1; }
  T& at(int dx, int dy) { return c[static_cast<std::size_t>((dy + ry) * width() + dx + rx)]; }
  const T& at(int dx, int dy) const {
    return c[static_cast<std::size_t>((dy + ry) * width() + dx + rx)];
  }
  bool contains(int dx, int dy) const { return dx >= -rx && dx <= rx && dy >= -ry && dy <= ry; }
  T get(int dx, int dy) const { return contains(dx, dy) ? at(dx, dy) : T{}; }

  T sum() const {
    T s{};
    for (const T& v : c) s += v;
    return s;
  }
  bool operator==(const StencilT&) const = default;

  /// Build from rows listed top (dy = +ry) to bottom, as stencils are printed.
  static StencilT from_rows(const std::vector<std::vector<T>>& rows) {
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(rows.at(0).size());
    if (h % 2 == 0 || w % 2 == 0) throw Error(ErrorKind::IncompatibleFootprints, "even stencil extent");
    StencilT s(w / 2, h / 2);
    for (int r = 0; r < h; ++r)
      for (int q = 0; q < w; ++q) s.at(q - w / 2, h / 2 - r) = rows[r].at(q);
    return s;
  }

  /// Tensor product a(dx) b(dy).
  static StencilT outer(const std::vector<T>& a, const std::vector<T>& b) {
    StencilT s(static_cast<int>(a.size()) / 2, static_cast<int>(b.size()) / 2);
    for (int y = -s.ry; y <= s.ry; ++y)
      for (int x = -s.rx; x <= s.rx; ++x) s.at(x, y) = a[x + s.rx] * b[y + s.ry];
    return s;
  }
};

using IStencil = StencilT<std::int64_t>;
using DStencil = StencilT<double>;

/// Stencil of the product A B of two operators on the same grid.
template <class T>
StencilT<T> stencil_compose(const StencilT<T>& a, const StencilT<T>& b) {
  StencilT<T> out(a.rx + b.rx, a.ry + b.ry);
  for (int ay = -a.ry; ay <= a.ry; ++ay)
    for (int ax = -a.rx; ax <= a.rx; ++ax)
      for (int by = -b.ry; by <= b.ry; ++by)
        for (int bx = -b.rx; bx <= b.rx; ++bx) out.at(ax + bx, ay + by) += a.at(ax, ay) * b.at(bx, by);
  return out;
}

/// Coarse stencil of R A P for standard coarsening. `r` is the restriction
/// gather around the coincident fine point, `a` the fine operator, and `p`
/// the prolongation written as the fine footprint of one coarse point.
template <class T>
StencilT<T> galerkin_compose(const StencilT<T>& r, const StencilT<T>& a, const StencilT<T>& p) {
  const StencilT<T> ra = stencil_compose(r, a);
  // coarse offset e couples to fine offset d when d - 2e lies in p
  const int ex = (ra.rx + p.rx) / 2;
  const int ey = (ra.ry + p.ry) / 2;
  StencilT<T> out(ex, ey);
  for (int ey_ = -ey; ey_ <= ey; ++ey_)
    for (int ex_ = -ex; ex_ <= ex; ++ex_) {
      T s{};
      for (int dy = -ra.ry; dy <= ra.ry; ++dy)
        for (int dx = -ra.rx; dx <= ra.rx; ++dx) s += ra.at(dx, dy) * p.get(dx - 2 * ex_, dy - 2 * ey_);
      out.at(ex_, ey_) = s;
    }
  return out;
}

/// Result of composing the high-order transfer pair around -Laplacian and
/// the identity (the wavenumber part), as integer numerators:
///   Laplacian part = lap / (256 (2h)^2),   mass part = k^2 * mass / 64^2.
struct ComposedStencil {
  IStencil lap;
  IStencil mass;
};

/// The two 5x5 coarse stencils as they are commonly printed.
const IStencil& glk_laplacian_reference();
const IStencil& glk_mass_reference();

/// Recompute both stencils by composition and compare them with the
/// reference tables. Throws CompositionMismatch on any difference.
ComposedStencil derive_red_glk_stencils();

}  // namespace helmdef
