#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "helmdef/field.hpp"
#include "helmdef/media.hpp"

namespace helmdef {

enum class BcKind { Dirichlet, Sommerfeld };

const char* to_string(BcKind bc);
BcKind parse_bc(const std::string& s);

/// Complex shift (beta1, beta2) of the shifted Laplacian; (1, 0) is Helmholtz.
struct Shift {
  double b1 = 1.0;
  double b2 = 0.0;
  cplx value() const { return {b1, b2}; }
};

/// One stencil entry: coefficient c multiplies u(i + di, j + dj).
struct Tap {
  int di = 0;
  int dj = 0;
  cplx c = 0.0;
};

struct RTap {
  int di = 0;
  int dj = 0;
  double c = 0.0;
};

/// Translation-invariant part of a stencil:
///   y = sum_lap c u(p+d)  +  mass_factor * sum_mass w k^2(p+d) u(p+d)
struct InteriorStencil {
  int radius = 1;
  std::vector<RTap> lap;
  std::vector<RTap> mass;
  cplx mass_factor = -1.0;

  InteriorStencil scaled(double s) const;
};

/// Second-order five-point stencil at mesh width h with shift s.
InteriorStencil five_point(double h, Shift s = {});

/// How values outside the domain are eliminated when a stencil reaches past
/// the boundary.
enum class GhostRule {
  None,            // taps outside are an error (band must be wide enough)
  Sommerfeld2,     // u(-1) = u(1) + 2 i h k u(0), per direction
  Sommerfeld4,     // u(-1) = u(1) + 2 i h k (1 - k^2 h^2 / 6) u(0); corner ghost averaged
  Sommerfeld2Avg,  // second-order edge rule with averaged corner ghost
  DirichletLinear  // u(-1) = 2 u(0) - u(1)
};

/// Rule for the wavenumber used by mass taps that land on a ghost point.
enum class GhostK { Clamp, Zero };

/// Explicit rows for points close to the boundary. Produced once per operator.
using RowFn = std::function<std::vector<Tap>(int i, int j)>;

/// Matrix-free operator that applies a fixed interior stencil away from the
/// boundary and explicit precomputed rows inside a band of `band` layers.
class StencilOperator {
 public:
  StencilOperator(LayoutPtr layout, InteriorStencil interior, RealField k2, int band, RowFn rows);

  const LayoutPtr& layout_ptr() const { return layout_; }
  const Layout& layout() const { return *layout_; }
  const Grid2D& grid() const { return layout_->grid(); }
  const InteriorStencil& interior() const { return interior_; }
  int band() const { return band_; }

  /// y = A x. Exchanges the halos of x first.
  void apply(Field& x, Field& y) const;

  /// Full row at global point (i, j), taps relative to (i, j).
  std::vector<Tap> row(int i, int j) const;
  cplx diagonal(int i, int j) const;
  /// 1 / diagonal at every owned point; throws ZeroDiagonal.
  const Field& inverse_diagonal() const;

  /// Upper bound of multiply-adds per point, for cost reporting.
  int max_row_length() const;

 private:
  struct BandRow {
    std::size_t idx;
    int first;
    int count;
  };
  struct StoredTap {
    std::ptrdiff_t off;
    cplx c;
  };
  struct BlockRows {
    std::vector<BandRow> rows;
    std::vector<StoredTap> taps;
    std::vector<std::ptrdiff_t> lap_off;
    std::vector<std::ptrdiff_t> mass_off;
  };

  bool in_band(int i, int j) const;

  LayoutPtr layout_;
  InteriorStencil interior_;
  RealField k2_;
  int band_;
  RowFn rows_fn_;
  std::vector<BlockRows> block_rows_;
  mutable std::unique_ptr<Field> inv_diag_;
  bool five_point_fast_ = false;
};

using StencilOperatorPtr = std::shared_ptr<const StencilOperator>;

/// Distance of (i, j) to the nearest boundary line.
int boundary_distance(const Grid2D& g, int i, int j);

/// Rows for boundary-band points: Dirichlet gives identity rows on the
/// boundary and drops every tap that lands on a boundary node elsewhere;
/// Sommerfeld expands ghost taps with `ghost`. `pick(d)` selects the
/// interior stencil used at distance d from the boundary.
struct BandRecipe {
  BcKind bc = BcKind::Sommerfeld;
  GhostRule ghost = GhostRule::Sommerfeld2;
  GhostK ghost_k = GhostK::Clamp;
  std::function<const InteriorStencil&(int dist)> pick;
};

std::vector<Tap> band_row(const Grid2D& g, const WavenumberField& k, const BandRecipe& r, int i,
                          int j);

/// Fine-grid Helmholtz (shift (1,0)) or CSLP operator with the five-point
/// scheme and the given boundary condition.
StencilOperatorPtr make_shifted_laplacian(const LayoutPtr& layout, const WavenumberField& k,
                                          BcKind bc, Shift shift = {});

inline StencilOperatorPtr make_helmholtz(const LayoutPtr& layout, const WavenumberField& k,
                                         BcKind bc) {
  return make_shifted_laplacian(layout, k, bc, Shift{1.0, 0.0});
}

/// Multiply every row by 1/2 on boundary edges and 1/4 at corners; used to
/// expose the symmetry of the Sommerfeld matrix.
double sommerfeld_row_weight(const Grid2D& g, int i, int j);

}  // namespace helmdef
