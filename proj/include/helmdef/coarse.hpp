#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "helmdef/operators.hpp"
#include "helmdef/stencil.hpp"
#include "helmdef/transfer.hpp"

namespace helmdef {

enum class CoarseOpVariant {
  StrGlk,
  StclOpGlk,
  ReD_O2,
  ReD_O4,
  ReD_O6,
  ReD_cmpO4,
  ReD_Glk1,
  ReD_Glk2,
  ReD_9ptO2,
};

const char* to_string(CoarseOpVariant v);
CoarseOpVariant parse_coarse_op(const std::string& s);

/// Halo width the variant needs on the coarse level.
int required_halo(CoarseOpVariant v);

/// Scale of the re-discretised operators relative to R A_h P.
/// Auto: multiplied by the restriction mass, so they match R A_h P.
/// Literal: the stencils as written at mesh width 2h, used with the
/// transposed prolongation as restriction (the Galerkin-derived stencil is
/// written at mass 4). Unit: the plain 2h discretisation, as needed when the
/// coarse system is preconditioned by the 2h CSLP operator (TLKM).
enum class CoarseScale { Auto, Literal, Unit };

CoarseScale parse_coarse_scale(const std::string& s);
const char* to_string(CoarseScale s);

/// Coefficients of a compact nine-point scheme
///   (1/H^2)[a] - k^2 [b]
struct NinePointCoeffs {
  double a0 = 0.0, as = 0.0, ac = 0.0;
  double b0 = 1.0, bs = 0.0, bc = 0.0;
};

/// Fourth-order compact coefficients with free parameter gamma.
NinePointCoeffs compact_o4_coeffs(double gamma = 1.0);
/// Printed eigenvalue-aligned coefficients for k = 80.
NinePointCoeffs nine_point_o2_printed();

struct CoarseContext {
  LayoutPtr fine_layout;
  LayoutPtr coarse_layout;
  WavenumberField k_fine;
  BcKind bc = BcKind::Sommerfeld;
  TransferOrder transfer = TransferOrder::Low;
  StencilOperatorPtr fine_op;  // Helmholtz on the fine grid, StrGlk / StclOpGlk only
  CoarseScale scale = CoarseScale::Literal;
  NinePointCoeffs nine_point = nine_point_o2_printed();
  bool memoize_stencils = false;  // StclOpGlk only
};

class CoarseOperator {
 public:
  virtual ~CoarseOperator() = default;
  virtual CoarseOpVariant variant() const = 0;
  virtual const LayoutPtr& layout() const = 0;
  /// y = A_2h x; exchanges the halos of x.
  virtual void apply(Field& x, Field& y) const = 0;
  /// Row at coarse point (i, j) when the operator has an explicit stencil.
  virtual std::vector<Tap> row(int i, int j) const = 0;
};

using CoarseOperatorPtr = std::shared_ptr<const CoarseOperator>;

CoarseOperatorPtr make_coarse_operator(CoarseOpVariant v, const CoarseContext& ctx);

/// The underlying stencil operator for re-discretised variants (null for
/// the Galerkin products).
StencilOperatorPtr red_stencil_operator(const CoarseOperator& op);

/// Interior stencils of the re-discretised variants at mesh width H (unit
/// restriction mass; Helmholtz sign, mass factor -1).
InteriorStencil red_o2(double H);
InteriorStencil red_o4(double H);
InteriorStencil red_o6(double H);
InteriorStencil red_nine_point(double H, const NinePointCoeffs& c);
/// Galerkin-derived 5x5 stencil divided by the restriction mass 4.
InteriorStencil red_glk(double H);

/// Multiply-add count for one application, per the nnz-based model
/// (two FLOPs per nonzero). M coarse points, N fine points.
std::int64_t flops_estimate(CoarseOpVariant v, std::int64_t M, std::int64_t N);

}  // namespace helmdef
