#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "helmdef/grid.hpp"

namespace helmdef {

using cplx = std::complex<double>;

/// Values on a distributed grid: one local array (owned points plus halo)
/// per worker, stored back to back. Halo contents are only meaningful after
/// exchange_halos(); the `halos_fresh` flag tracks that.
template <class T>
class BasicField {
 public:
  BasicField() = default;
  explicit BasicField(LayoutPtr layout)
      : layout_(std::move(layout)), data_(layout_->storage_size(), T{}), fresh_(true) {}

  const LayoutPtr& layout_ptr() const { return layout_; }
  const Layout& layout() const { return *layout_; }
  const Grid2D& grid() const { return layout_->grid(); }
  bool empty() const { return !layout_; }

  /// Mutable access invalidates halos.
  std::span<T> data() {
    fresh_ = false;
    return data_;
  }
  std::span<const T> data() const { return data_; }
  std::span<const T> cdata() const { return data_; }

  T* block_origin(int b) {
    fresh_ = false;
    return data_.data() + layout_->index(b, 0, 0);
  }
  const T* block_origin(int b) const { return data_.data() + layout_->index(b, 0, 0); }

  /// Value of the owned copy of global point (i, j).
  T at(int i, int j) const { return data_[layout_->owned_index(i, j)]; }
  void set(int i, int j, T v) {
    fresh_ = false;
    data_[layout_->owned_index(i, j)] = v;
  }

  bool halos_fresh() const { return fresh_; }
  void mark_fresh(bool f) { fresh_ = f; }

  void exchange_halos() {
    if (fresh_) return;
    for (const Layout::CopyRun& r : layout_->halo_plan()) {
      std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(r.src), r.len,
                  data_.begin() + static_cast<std::ptrdiff_t>(r.dst));
    }
    fresh_ = true;
  }

  void fill(T v) {
    std::fill(data_.begin(), data_.end(), v);
    fresh_ = true;
  }

  /// Owned values in global lexicographic order (i fastest).
  std::vector<T> to_global() const {
    const Grid2D& g = grid();
    std::vector<T> out(g.points());
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) out[static_cast<std::size_t>(j) * g.nx + i] = at(i, j);
    return out;
  }

  void from_global(std::span<const T> v) {
    const Grid2D& g = grid();
    std::fill(data_.begin(), data_.end(), T{});
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        data_[layout_->owned_index(i, j)] = v[static_cast<std::size_t>(j) * g.nx + i];
    fresh_ = false;
    exchange_halos();
  }

  void from_function(const std::function<T(int, int)>& f) {
    const Grid2D& g = grid();
    std::fill(data_.begin(), data_.end(), T{});
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) data_[layout_->owned_index(i, j)] = f(i, j);
    fresh_ = false;
    exchange_halos();
  }

 private:
  LayoutPtr layout_;
  std::vector<T> data_;
  bool fresh_ = false;
};

using Field = BasicField<cplx>;
using RealField = BasicField<double>;

// Vector algebra over the whole storage. Halo cells take part in the
// element-wise updates so that a combination of fresh fields stays fresh;
// reductions only visit owned points and are summed in worker order.

/// sum conj(x) * y over owned points.
cplx dot(const Field& x, const Field& y);
double norm2(const Field& x);
/// y += a x
void axpy(cplx a, const Field& x, Field& y);
/// y += a x on owned points, then return dot(z, y). Leaves y's halos stale.
cplx axpy_dot(cplx a, const Field& x, Field& y, const Field& z);
/// y = a x + b y
void axpby(cplx a, const Field& x, cplx b, Field& y);
void scale(cplx a, Field& x);
void copy(const Field& src, Field& dst);
/// Maximum over owned points of |x - y|.
double max_abs_diff(const Field& x, const Field& y);

}  // namespace helmdef
