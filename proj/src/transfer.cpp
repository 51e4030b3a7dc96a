#include "helmdef/transfer.hpp"

#include <algorithm>
#include <array>

namespace helmdef {

const char* to_string(TransferOrder t) { return t == TransferOrder::Low ? "low" : "high"; }

double transfer_sigma(TransferOrder t) { return t == TransferOrder::Low ? 4.0 : 1.0; }
double restriction_mass(TransferOrder t) { return t == TransferOrder::Low ? 1.0 : 4.0; }

namespace {

struct W1 {
  int off;
  double w;
};

// restriction weights around the coincident fine point
const std::vector<W1>& restrict_1d(TransferOrder t) {
  static const std::vector<W1> low = {{-1, 0.25}, {0, 0.5}, {1, 0.25}};
  static const std::vector<W1> high = {
      {-2, 0.125}, {-1, 0.5}, {0, 0.75}, {1, 0.5}, {2, 0.125}};
  return t == TransferOrder::Low ? low : high;
}

struct W1Set {
  std::array<W1, 3> w;
  int n;
  const W1* begin() const { return w.data(); }
  const W1* end() const { return w.data() + n; }
};

// coarse weights read by fine index f: (coarse index, weight)
W1Set prolong_1d(TransferOrder t, int f) {
  const int c = f / 2;
  if (f % 2 == 1) return {{W1{c, 0.5}, W1{c + 1, 0.5}, W1{}}, 2};
  if (t == TransferOrder::Low) return {{W1{c, 1.0}, W1{}, W1{}}, 1};
  return {{W1{c - 1, 0.125}, W1{c, 0.75}, W1{c + 1, 0.125}}, 3};
}

int reach(TransferOrder t) { return t == TransferOrder::Low ? 1 : 2; }

int dist(const Grid2D& g, int i, int j) {
  return std::min(std::min(i, g.nx - 1 - i), std::min(j, g.ny - 1 - j));
}

template <class F>
void visit_restriction(TransferOrder t, BcKind bc, const Grid2D& fine, int ic, int jc, F&& emit) {
  const int fi = fine_index(ic);
  const int fj = fine_index(jc);
  if (bc == BcKind::Dirichlet && fine.on_boundary(fi, fj)) {
    emit(fi, fj, 1.0);
    return;
  }
  const auto& w = restrict_1d(t);
  for (const W1& wy : w) {
    for (const W1& wx : w) {
      const int i = fi + wx.off;
      const int j = fj + wy.off;
      if (i < 0 || j < 0 || i >= fine.nx || j >= fine.ny) continue;
      if (bc == BcKind::Dirichlet && fine.on_boundary(i, j)) continue;
      emit(i, j, wx.w * wy.w);
    }
  }
}

template <class F>
void visit_prolongation(TransferOrder t, BcKind bc, const Grid2D& fine, int i, int j, F&& emit) {
  const int ncx = (fine.nx + 1) / 2;
  const int ncy = (fine.ny + 1) / 2;
  if (bc == BcKind::Dirichlet && fine.on_boundary(i, j)) {
    // linear interpolation along the boundary line from coarse boundary values
    if (i == 0 || i == fine.nx - 1) {
      for (const W1& wy : prolong_1d(TransferOrder::Low, j)) emit(i / 2, wy.off, wy.w);
    } else {
      for (const W1& wx : prolong_1d(TransferOrder::Low, i)) emit(wx.off, j / 2, wx.w);
    }
    return;
  }
  for (const W1& wy : prolong_1d(t, j)) {
    for (const W1& wx : prolong_1d(t, i)) {
      if (wx.off < 0 || wy.off < 0 || wx.off >= ncx || wy.off >= ncy) continue;
      if (bc == BcKind::Dirichlet &&
          (wx.off == 0 || wy.off == 0 || wx.off == ncx - 1 || wy.off == ncy - 1)) {
        continue;
      }
      emit(wx.off, wy.off, wx.w * wy.w);
    }
  }
}

}  // namespace

std::vector<GTap> restriction_row(TransferOrder t, BcKind bc, const Grid2D& fine, int ic, int jc) {
  std::vector<GTap> out;
  visit_restriction(t, bc, fine, ic, jc, [&](int i, int j, double w) { out.push_back({i, j, w}); });
  return out;
}

std::vector<GTap> prolongation_row(TransferOrder t, BcKind bc, const Grid2D& fine, int i, int j) {
  std::vector<GTap> out;
  visit_prolongation(t, bc, fine, i, j, [&](int ci, int cj, double w) { out.push_back({ci, cj, w}); });
  return out;
}

void restrict_field(TransferOrder t, BcKind bc, Field& fine, Field& coarse) {
  fine.exchange_halos();
  const Layout& Lf = fine.layout();
  const Layout& Lc = coarse.layout();
  const Grid2D& gf = Lf.grid();
  const Grid2D& gc = Lc.grid();
  if (gc.nx != (gf.nx + 1) / 2 || gc.ny != (gf.ny + 1) / 2 || Lf.blocks() != Lc.blocks()) {
    throw Error(ErrorKind::NotCoarsenable, "restriction between incompatible layouts");
  }
  const int r = reach(t);
  const int margin = r + (bc == BcKind::Dirichlet ? 1 : 0);
  if (Lf.halo() < r) throw Error(ErrorKind::IncompatibleFootprints, "fine halo too narrow");
  const cplx* xs = fine.cdata().data();
  cplx* ys = coarse.data().data();
  const auto& w = restrict_1d(t);
  const int nw = static_cast<int>(w.size());
  for_each_block(Lc, [&](int b) {
    const Layout::Block& C = Lc.block(b);
    const Layout::Block& F = Lf.block(b);
    for (int jc = C.yr.lo; jc < C.yr.hi; ++jc) {
      for (int ic = C.xr.lo; ic < C.xr.hi; ++ic) {
        const int fi = fine_index(ic);
        const int fj = fine_index(jc);
        const std::size_t dst = Lc.index(b, ic - C.xr.lo, jc - C.yr.lo);
        const std::size_t ctr = Lf.index(b, fi - F.xr.lo, fj - F.yr.lo);
        if (dist(gf, fi, fj) >= margin) {
          double sr = 0.0, si = 0.0;
          for (int q = 0; q < nw; ++q) {
            const cplx* row = xs + ctr + static_cast<std::ptrdiff_t>(w[q].off) * F.ld;
            double rr = 0.0, ri = 0.0;
            for (int p = 0; p < nw; ++p) {
              rr += w[p].w * row[w[p].off].real();
              ri += w[p].w * row[w[p].off].imag();
            }
            sr += w[q].w * rr;
            si += w[q].w * ri;
          }
          ys[dst] = cplx(sr, si);
        } else {
          cplx s = 0.0;
          visit_restriction(t, bc, gf, ic, jc, [&](int i, int j, double w) {
            s += w * xs[Lf.index(b, i - F.xr.lo, j - F.yr.lo)];
          });
          ys[dst] = s;
        }
      }
    }
  });
  coarse.mark_fresh(false);
}

void prolong_field(TransferOrder t, BcKind bc, Field& coarse, Field& fine) {
  coarse.exchange_halos();
  const Layout& Lf = fine.layout();
  const Layout& Lc = coarse.layout();
  const Grid2D& gf = Lf.grid();
  if (Lc.grid().nx != (gf.nx + 1) / 2 || Lc.grid().ny != (gf.ny + 1) / 2 ||
      Lf.blocks() != Lc.blocks()) {
    throw Error(ErrorKind::NotCoarsenable, "prolongation between incompatible layouts");
  }
  const cplx* xs = coarse.cdata().data();
  cplx* ys = fine.data().data();
  // interior points: coarse taps stay away from the coarse boundary
  const int margin = 3;
  for_each_block(Lf, [&](int b) {
    const Layout::Block& F = Lf.block(b);
    const Layout::Block& C = Lc.block(b);
    for (int j = F.yr.lo; j < F.yr.hi; ++j) {
      for (int i = F.xr.lo; i < F.xr.hi; ++i) {
        const std::size_t dst = Lf.index(b, i - F.xr.lo, j - F.yr.lo);
        if (dist(gf, i, j) >= margin) {
          const auto wx = prolong_1d(t, i);
          const auto wy = prolong_1d(t, j);
          double sr = 0.0, si = 0.0;
          for (const W1& qy : wy) {
            const std::size_t rowb = Lc.index(b, 0, qy.off - C.yr.lo) - C.xr.lo;
            double rr = 0.0, ri = 0.0;
            for (const W1& qx : wx) {
              const cplx v = xs[rowb + qx.off];
              rr += qx.w * v.real();
              ri += qx.w * v.imag();
            }
            sr += qy.w * rr;
            si += qy.w * ri;
          }
          ys[dst] = cplx(sr, si);
        } else {
          cplx s = 0.0;
          visit_prolongation(t, bc, gf, i, j, [&](int ci, int cj, double w) {
            s += w * xs[Lc.index(b, ci - C.xr.lo, cj - C.yr.lo)];
          });
          ys[dst] = s;
        }
      }
    }
  });
  fine.mark_fresh(false);
}

}  // namespace helmdef
