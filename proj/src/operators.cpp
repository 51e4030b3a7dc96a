#include "helmdef/operators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace helmdef {

const char* to_string(BcKind bc) { return bc == BcKind::Dirichlet ? "dirichlet" : "sommerfeld"; }

BcKind parse_bc(const std::string& s) {
  if (s == "dirichlet" || s == "D") return BcKind::Dirichlet;
  if (s == "sommerfeld" || s == "S") return BcKind::Sommerfeld;
  throw Error(ErrorKind::ConfigError, "unknown boundary condition '" + s + "'");
}

InteriorStencil InteriorStencil::scaled(double s) const {
  InteriorStencil out = *this;
  for (RTap& t : out.lap) t.c *= s;
  out.mass_factor *= s;
  return out;
}

InteriorStencil five_point(double h, Shift s) {
  const double ih2 = 1.0 / (h * h);
  InteriorStencil st;
  st.radius = 1;
  st.lap = {{0, 0, 4.0 * ih2}, {-1, 0, -ih2}, {1, 0, -ih2}, {0, -1, -ih2}, {0, 1, -ih2}};
  st.mass = {{0, 0, 1.0}};
  st.mass_factor = -s.value();
  return st;
}

int boundary_distance(const Grid2D& g, int i, int j) {
  return std::min({i, j, g.nx - 1 - i, g.ny - 1 - j});
}

double sommerfeld_row_weight(const Grid2D& g, int i, int j) {
  const bool ex = i == 0 || i == g.nx - 1;
  const bool ey = j == 0 || j == g.ny - 1;
  return (ex ? 0.5 : 1.0) * (ey ? 0.5 : 1.0);
}

namespace {

struct RowBuilder {
  const Grid2D& g;
  const WavenumberField& k;
  const BandRecipe& r;
  int ci;
  int cj;
  std::map<std::pair<int, int>, cplx> acc;

  bool inside(int p, int q) const { return p >= 0 && q >= 0 && p < g.nx && q < g.ny; }

  double k_at_clamped(int p, int q) const {
    return k.at(std::clamp(p, 0, g.nx - 1), std::clamp(q, 0, g.ny - 1));
  }

  // boundary coordinate and mirror for an index one step outside
  static std::pair<int, int> fold(int p, int n) {
    if (p == -1) return {0, 1};
    if (p == n) return {n - 1, n - 2};
    throw Error(ErrorKind::IncompatibleFootprints,
                "stencil reaches " + std::to_string(p) + " outside a boundary of size " +
                    std::to_string(n));
  }

  cplx ghost_factor(double kb) const {
    const double h = g.h;
    const cplx two_ihk = cplx(0.0, 2.0 * h * kb);
    if (r.ghost == GhostRule::Sommerfeld4) return two_ihk * (1.0 - kb * kb * h * h / 6.0);
    return two_ihk;
  }

  void add(int p, int q, cplx c) {
    if (c == 0.0) return;
    if (inside(p, q)) {
      if (r.bc == BcKind::Dirichlet && g.on_boundary(p, q)) return;
      acc[{p - ci, q - cj}] += c;
      return;
    }
    const bool out_x = p < 0 || p >= g.nx;
    const bool out_y = q < 0 || q >= g.ny;
    switch (r.ghost) {
      case GhostRule::None:
        throw Error(ErrorKind::IncompatibleFootprints, "band too narrow for stencil");
      case GhostRule::DirichletLinear: {
        if (out_x) {
          auto [b, m] = fold(p, g.nx);
          add(b, q, 2.0 * c);
          add(m, q, -c);
        } else {
          auto [b, m] = fold(q, g.ny);
          add(p, b, 2.0 * c);
          add(p, m, -c);
        }
        return;
      }
      case GhostRule::Sommerfeld2:
      case GhostRule::Sommerfeld4:
      case GhostRule::Sommerfeld2Avg: {
        const bool average = r.ghost != GhostRule::Sommerfeld2;
        if (out_x && out_y && average) {
          auto [bx, mx] = fold(p, g.nx);
          auto [by, my] = fold(q, g.ny);
          add(bx, q, 0.5 * c);
          add(p, by, 0.5 * c);
          return;
        }
        if (out_x) {
          auto [b, m] = fold(p, g.nx);
          add(m, q, c);
          add(b, q, c * ghost_factor(k_at_clamped(b, q)));
        } else {
          auto [b, m] = fold(q, g.ny);
          add(p, m, c);
          add(p, b, c * ghost_factor(k_at_clamped(p, b)));
        }
        return;
      }
    }
  }
};

}  // namespace

std::vector<Tap> band_row(const Grid2D& g, const WavenumberField& k, const BandRecipe& r, int i,
                          int j) {
  const int d = boundary_distance(g, i, j);
  if (r.bc == BcKind::Dirichlet && d == 0) return {Tap{0, 0, 1.0}};
  const InteriorStencil& st = r.pick(d);
  RowBuilder b{g, k, r, i, j, {}};
  for (const RTap& t : st.lap) b.add(i + t.di, j + t.dj, t.c);
  for (const RTap& t : st.mass) {
    const int p = i + t.di;
    const int q = j + t.dj;
    double k2 = 0.0;
    if (b.inside(p, q)) {
      k2 = k.at(p, q) * k.at(p, q);
    } else if (r.ghost_k == GhostK::Clamp) {
      const double kk = b.k_at_clamped(p, q);
      k2 = kk * kk;
    }
    b.add(p, q, st.mass_factor * t.c * k2);
  }
  std::vector<Tap> out;
  out.reserve(b.acc.size());
  for (const auto& [off, c] : b.acc) out.push_back({off.first, off.second, c});
  return out;
}

StencilOperator::StencilOperator(LayoutPtr layout, InteriorStencil interior, RealField k2,
                                 int band, RowFn rows)
    : layout_(std::move(layout)),
      interior_(std::move(interior)),
      k2_(std::move(k2)),
      band_(band),
      rows_fn_(std::move(rows)) {
  const Layout& L = *layout_;
  if (interior_.radius > L.halo()) {
    throw Error(ErrorKind::IncompatibleFootprints, "stencil radius exceeds halo width");
  }
  if (band_ < interior_.radius) {
    throw Error(ErrorKind::IncompatibleFootprints, "boundary band narrower than stencil radius");
  }
  k2_.exchange_halos();
  const Grid2D& g = L.grid();
  block_rows_.resize(L.blocks());
  for (int b = 0; b < L.blocks(); ++b) {
    const Layout::Block& B = L.block(b);
    BlockRows& br = block_rows_[b];
    for (const RTap& t : interior_.lap) br.lap_off.push_back(t.di + static_cast<std::ptrdiff_t>(t.dj) * B.ld);
    for (const RTap& t : interior_.mass) br.mass_off.push_back(t.di + static_cast<std::ptrdiff_t>(t.dj) * B.ld);
    for (int lj = 0; lj < B.ny; ++lj) {
      for (int li = 0; li < B.nx; ++li) {
        const int i = B.xr.lo + li;
        const int j = B.yr.lo + lj;
        if (!in_band(i, j)) continue;
        std::vector<Tap> taps = rows_fn_(i, j);
        BandRow row{L.index(b, li, lj), static_cast<int>(br.taps.size()), static_cast<int>(taps.size())};
        for (const Tap& t : taps) {
          if (std::max(std::abs(t.di), std::abs(t.dj)) > L.halo()) {
            throw Error(ErrorKind::IncompatibleFootprints, "boundary row wider than halo");
          }
          br.taps.push_back({t.di + static_cast<std::ptrdiff_t>(t.dj) * B.ld, t.c});
        }
        br.rows.push_back(row);
      }
    }
  }
  (void)g;
  // the common five-point case gets a hand-written kernel
  if (interior_.radius == 1 && interior_.lap.size() == 5 && interior_.mass.size() == 1 &&
      interior_.mass[0].di == 0 && interior_.mass[0].dj == 0 && interior_.lap[0].di == 0 &&
      interior_.lap[0].dj == 0) {
    const double cn = interior_.lap[1].c;
    five_point_fast_ = std::all_of(interior_.lap.begin() + 1, interior_.lap.end(),
                                   [&](const RTap& t) { return t.c == cn; });
  }
}

bool StencilOperator::in_band(int i, int j) const {
  return boundary_distance(layout_->grid(), i, j) < band_;
}

void StencilOperator::apply(Field& x, Field& y) const {
  x.exchange_halos();
  const Layout& L = *layout_;
  const Grid2D& g = L.grid();
  const cplx* xs = x.cdata().data();
  const double* ks = k2_.cdata().data();
  cplx* ys = y.data().data();
  for_each_block(L, [&](int b) {
    const Layout::Block& B = L.block(b);
    const BlockRows& br = block_rows_[b];
    const int i0 = std::max(band_, B.xr.lo);
    const int i1 = std::min(g.nx - band_, B.xr.hi);
    const int j0 = std::max(band_, B.yr.lo);
    const int j1 = std::min(g.ny - band_, B.yr.hi);
    if (five_point_fast_) {
      const double c0 = interior_.lap[0].c;
      const double cn = interior_.lap[1].c;
      const cplx mf = interior_.mass_factor * interior_.mass[0].c;
      const double mr = mf.real();
      const double mi = mf.imag();
      const std::ptrdiff_t ld = B.ld;
      for (int j = j0; j < j1; ++j) {
        const std::size_t base = L.index(b, i0 - B.xr.lo, j - B.yr.lo);
        const cplx* xp = xs + base;
        const double* kp = ks + base;
        cplx* yp = ys + base;
        const int n = i1 - i0;
        for (int t = 0; t < n; ++t) {
          const cplx u = xp[t];
          const cplx nb = xp[t - 1] + xp[t + 1] + xp[t - ld] + xp[t + ld];
          const double k2 = kp[t];
          // (c0 + mf k2) u + cn nb, expanded to keep the loop free of complex calls
          const double dr = c0 + mr * k2;
          const double di = mi * k2;
          yp[t] = cplx(dr * u.real() - di * u.imag() + cn * nb.real(),
                       dr * u.imag() + di * u.real() + cn * nb.imag());
        }
      }
    } else {
      const std::size_t nl = br.lap_off.size();
      const std::size_t nm = br.mass_off.size();
      const double mfr = interior_.mass_factor.real();
      const double mfi = interior_.mass_factor.imag();
      for (int j = j0; j < j1; ++j) {
        const std::size_t base = L.index(b, i0 - B.xr.lo, j - B.yr.lo);
        for (int t = 0; t < i1 - i0; ++t) {
          const std::size_t p = base + t;
          double lr = 0.0, li = 0.0;
          for (std::size_t m = 0; m < nl; ++m) {
            const cplx u = xs[p + br.lap_off[m]];
            lr += interior_.lap[m].c * u.real();
            li += interior_.lap[m].c * u.imag();
          }
          double sr = 0.0, si = 0.0;
          for (std::size_t m = 0; m < nm; ++m) {
            const std::size_t q = p + br.mass_off[m];
            const double w = interior_.mass[m].c * ks[q];
            sr += w * xs[q].real();
            si += w * xs[q].imag();
          }
          ys[p] = cplx(lr + mfr * sr - mfi * si, li + mfr * si + mfi * sr);
        }
      }
    }
    for (const BandRow& r : br.rows) {
      double sr = 0.0, si = 0.0;
      for (int m = r.first; m < r.first + r.count; ++m) {
        const StoredTap& t = br.taps[m];
        const cplx u = xs[r.idx + t.off];
        sr += t.c.real() * u.real() - t.c.imag() * u.imag();
        si += t.c.real() * u.imag() + t.c.imag() * u.real();
      }
      ys[r.idx] = cplx(sr, si);
    }
  });
  y.mark_fresh(false);
}

std::vector<Tap> StencilOperator::row(int i, int j) const {
  if (in_band(i, j)) return rows_fn_(i, j);
  std::map<std::pair<int, int>, cplx> acc;
  for (const RTap& t : interior_.lap) acc[{t.di, t.dj}] += t.c;
  for (const RTap& t : interior_.mass) {
    acc[{t.di, t.dj}] += interior_.mass_factor * t.c * k2_.at(i + t.di, j + t.dj);
  }
  std::vector<Tap> out;
  for (const auto& [off, c] : acc) out.push_back({off.first, off.second, c});
  return out;
}

cplx StencilOperator::diagonal(int i, int j) const {
  for (const Tap& t : row(i, j)) {
    if (t.di == 0 && t.dj == 0) return t.c;
  }
  return 0.0;
}

const Field& StencilOperator::inverse_diagonal() const {
  if (!inv_diag_) {
    auto d = std::make_unique<Field>(layout_);
    const Grid2D& g = grid();
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const cplx c = diagonal(i, j);
        if (std::abs(c) == 0.0) {
          throw Error(ErrorKind::ZeroDiagonal,
                      "at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
        }
        d->set(i, j, 1.0 / c);
      }
    }
    d->exchange_halos();
    inv_diag_ = std::move(d);
  }
  return *inv_diag_;
}

int StencilOperator::max_row_length() const {
  std::map<std::pair<int, int>, int> fp;
  for (const RTap& t : interior_.lap) fp[{t.di, t.dj}] = 1;
  for (const RTap& t : interior_.mass) fp[{t.di, t.dj}] = 1;
  int n = static_cast<int>(fp.size());
  for (const BlockRows& br : block_rows_)
    for (const BandRow& r : br.rows) n = std::max(n, r.count);
  return n;
}

StencilOperatorPtr make_shifted_laplacian(const LayoutPtr& layout, const WavenumberField& k,
                                          BcKind bc, Shift shift) {
  const Grid2D& g = layout->grid();
  if (g.nx != k.grid.nx || g.ny != k.grid.ny) {
    throw Error(ErrorKind::DimensionMismatch, "wavenumber field does not match grid");
  }
  InteriorStencil st = five_point(g.h, shift);
  BandRecipe recipe;
  recipe.bc = bc;
  recipe.ghost = bc == BcKind::Sommerfeld ? GhostRule::Sommerfeld2 : GhostRule::None;
  recipe.pick = [st](int) -> const InteriorStencil& { return st; };
  const int band = bc == BcKind::Dirichlet ? 2 : 1;
  RowFn rows = [g, k, recipe](int i, int j) { return band_row(g, k, recipe, i, j); };
  return std::make_shared<StencilOperator>(layout, st, k.k2_field(layout), band, rows);
}

}  // namespace helmdef
