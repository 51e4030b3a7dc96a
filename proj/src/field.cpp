#include "helmdef/field.hpp"

#include <algorithm>
#include <cmath>

namespace helmdef {

namespace {

// Interleaved re/im arithmetic keeps the inner loops vectorisable.
inline const double* as_real(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* as_real(cplx* p) { return reinterpret_cast<double*>(p); }

}  // namespace

cplx dot(const Field& x, const Field& y) {
  const Layout& L = x.layout();
  thread_local std::vector<cplx> partial;
  partial.assign(L.blocks(), cplx{});
  for_each_block(L, [&](int b) {
    const Layout::Block& B = L.block(b);
    double re = 0.0;
    double im = 0.0;
    for (int j = 0; j < B.ny; ++j) {
      const double* xp = as_real(x.block_origin(b) + static_cast<std::ptrdiff_t>(j) * B.ld);
      const double* yp = as_real(y.block_origin(b) + static_cast<std::ptrdiff_t>(j) * B.ld);
#pragma omp simd reduction(+ : re, im)
      for (int i = 0; i < 2 * B.nx; i += 2) {
        // conj(x) * y
        re += xp[i] * yp[i] + xp[i + 1] * yp[i + 1];
        im += xp[i] * yp[i + 1] - xp[i + 1] * yp[i];
      }
    }
    partial[b] = {re, im};
  });
  cplx s = 0.0;
  for (const cplx& p : partial) s += p;
  return s;
}

double norm2(const Field& x) {
  const Layout& L = x.layout();
  thread_local std::vector<double> partial;
  partial.assign(L.blocks(), 0.0);
  for_each_block(L, [&](int b) {
    const Layout::Block& B = L.block(b);
    double s = 0.0;
    for (int j = 0; j < B.ny; ++j) {
      const double* xp = as_real(x.block_origin(b) + static_cast<std::ptrdiff_t>(j) * B.ld);
#pragma omp simd reduction(+ : s)
      for (int i = 0; i < 2 * B.nx; ++i) s += xp[i] * xp[i];
    }
    partial[b] = s;
  });
  double s = 0.0;
  for (double p : partial) s += p;
  return std::sqrt(s);
}

cplx axpy_dot(cplx a, const Field& x, Field& y, const Field& z) {
  const Layout& L = y.layout();
  thread_local std::vector<cplx> partial;
  partial.assign(L.blocks(), cplx{});
  const double ar = a.real();
  const double ai = a.imag();
  for_each_block(L, [&](int b) {
    const Layout::Block& B = L.block(b);
    double re = 0.0;
    double im = 0.0;
    for (int j = 0; j < B.ny; ++j) {
      const std::size_t off = L.index(b, 0, j);
      const double* xp = as_real(x.cdata().data() + off);
      const double* zp = as_real(z.cdata().data() + off);
      double* yp = reinterpret_cast<double*>(const_cast<cplx*>(y.cdata().data() + off));
#pragma omp simd reduction(+ : re, im)
      for (int i = 0; i < 2 * B.nx; i += 2) {
        const double yr = yp[i] + ar * xp[i] - ai * xp[i + 1];
        const double yi = yp[i + 1] + ar * xp[i + 1] + ai * xp[i];
        yp[i] = yr;
        yp[i + 1] = yi;
        re += zp[i] * yr + zp[i + 1] * yi;
        im += zp[i] * yi - zp[i + 1] * yr;
      }
    }
    partial[b] = {re, im};
  });
  y.mark_fresh(false);
  cplx s = 0.0;
  for (const cplx& p : partial) s += p;
  return s;
}

void axpy(cplx a, const Field& x, Field& y) {
  const bool fresh = x.halos_fresh() && y.halos_fresh();
  const std::size_t n = x.cdata().size();
  const double* xp = as_real(x.cdata().data());
  double* yp = as_real(y.data().data());
  const double ar = a.real();
  const double ai = a.imag();
  for (std::size_t k = 0; k < 2 * n; k += 2) {
    yp[k] += ar * xp[k] - ai * xp[k + 1];
    yp[k + 1] += ar * xp[k + 1] + ai * xp[k];
  }
  y.mark_fresh(fresh);
}

void axpby(cplx a, const Field& x, cplx b, Field& y) {
  const bool fresh = x.halos_fresh() && y.halos_fresh();
  const std::size_t n = x.cdata().size();
  const double* xp = as_real(x.cdata().data());
  double* yp = as_real(y.data().data());
  const double ar = a.real(), ai = a.imag(), br = b.real(), bi = b.imag();
  for (std::size_t k = 0; k < 2 * n; k += 2) {
    const double yr = yp[k], yi = yp[k + 1];
    yp[k] = ar * xp[k] - ai * xp[k + 1] + br * yr - bi * yi;
    yp[k + 1] = ar * xp[k + 1] + ai * xp[k] + br * yi + bi * yr;
  }
  y.mark_fresh(fresh);
}

void scale(cplx a, Field& x) {
  const bool fresh = x.halos_fresh();
  for (cplx& v : x.data()) v *= a;
  x.mark_fresh(fresh);
}

void copy(const Field& src, Field& dst) {
  auto s = src.cdata();
  auto d = dst.data();
  std::copy(s.begin(), s.end(), d.begin());
  dst.mark_fresh(src.halos_fresh());
}

double max_abs_diff(const Field& x, const Field& y) {
  const Layout& L = x.layout();
  double m = 0.0;
  for (int b = 0; b < L.blocks(); ++b) {
    const Layout::Block& B = L.block(b);
    for (int j = 0; j < B.ny; ++j)
      for (int i = 0; i < B.nx; ++i) {
        const std::size_t k = L.index(b, i, j);
        m = std::max(m, std::abs(x.cdata()[k] - y.cdata()[k]));
      }
  }
  return m;
}

}  // namespace helmdef
