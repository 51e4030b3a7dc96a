#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "helmdef/coarse.hpp"
#include "helmdef/krylov.hpp"
#include "helmdef/mgcslp.hpp"

namespace helmdef {

enum class DeflationVariant { ADEF1, APD, TLKM };
DeflationVariant parse_deflation(const std::string& s);
const char* to_string(DeflationVariant v);

/// Plain GMRES, GMRES left-preconditioned by one 2h CSLP V-cycle, or an
/// exact LU of the coarse operator (sparse; dense for TLKM).
enum class CoarseSolveMode { Plain, Cslp, Direct };
CoarseSolveMode parse_coarse_mode(const std::string& s);
const char* to_string(CoarseSolveMode m);

struct DeflationConfig {
  DeflationVariant variant = DeflationVariant::APD;
  double gamma = 1.0;
  /// +1: P = I - A Q + gamma Q. -1 flips the sign of the gamma term.
  int gamma_sign = 1;
  CoarseOpVariant coarse_op = CoarseOpVariant::StrGlk;
  CoarseScale coarse_scale = CoarseScale::Literal;  // TLKM always uses Unit
  NinePointCoeffs nine_point = nine_point_o2_printed();
  double coarse_tol = 1e-6;
  int coarse_maxit = 0;  // 0: 4 sqrt(coarse points)
  CoarseSolveMode coarse_mode = CoarseSolveMode::Cslp;
  Shift shift{1.0, -0.5};
  /// Transfer pair; unset picks Low for ADEF1/TLKM and High for APD.
  std::optional<TransferOrder> transfer;
  MgOptions mg;
  bool memoize_stencils = false;
};

int default_coarse_maxit(std::size_t coarse_points);

/// Deflation preconditioners on one fine problem. Not thread safe: every
/// application reuses internal work vectors.
class Deflation {
 public:
  Deflation(const LayoutPtr& fine, const WavenumberField& k, BcKind bc, DeflationConfig cfg);

  const DeflationConfig& config() const { return cfg_; }
  TransferOrder transfer() const { return transfer_; }
  const StencilOperator& fine_operator() const { return *a_; }
  const StencilOperatorPtr& fine_operator_ptr() const { return a_; }
  const CoarseOperator& coarse_operator() const { return *a2h_; }
  const MultigridHierarchy& fine_cslp() const { return *mg_; }
  const LayoutPtr& coarse_layout() const { return coarse_layout_; }
  BcKind bc() const { return bc_; }

  /// y = A_h x
  void apply_A(Field& x, Field& y) const;
  /// y = P A_2h^-1 R v (TLKM: the composite coarse system instead of A_2h)
  void apply_Q(Field& v, Field& out) const;
  /// w = v - A Q v + sign gamma Q v
  void apply_P_shifted(Field& v, Field& out, double gamma) const;
  /// w = M^-1 (v - A Q v) + gamma Q v; APD when the transfers are high order.
  void apply_adef1(Field& v, Field& out) const;
  /// w = P~(M^-1 v) with P~ = I - M^-1 A Q~ + gamma Q~
  void apply_tlkm(Field& v, Field& out) const;
  /// The configured preconditioner.
  void apply(Field& v, Field& out) const;
  ApplyFn preconditioner() const;

  /// Q b + (I - Q A) u_hat
  void solution_correction(Field& u_hat, Field& b, Field& out) const;

  /// Coarse solve of A_2h v2 = v1 (composite operator for TLKM) from a zero guess.
  void coarse_solve(Field& rhs, Field& out) const;

  /// Counters since the last reset.
  void reset_stats() const;
  const std::vector<int>& coarse_iterations() const { return coarse_iters_; }
  int coarse_failures() const { return coarse_failures_; }
  double worst_coarse_residual() const { return worst_coarse_res_; }
  long fine_vcycles() const;
  long coarse_applications() const { return coarse_applies_; }

  /// Freeze the coarsest-level iteration counts of every V-cycle hierarchy
  /// so that the preconditioner is a fixed linear map during one solve.
  void freeze_vcycles(bool on) const;

 private:
  void coarse_matvec(Field& x, Field& y) const;
  void build_direct() const;

  LayoutPtr fine_;
  LayoutPtr coarse_layout_;
  WavenumberField k_;
  BcKind bc_;
  DeflationConfig cfg_;
  TransferOrder transfer_;
  StencilOperatorPtr a_;
  CoarseOperatorPtr a2h_;
  std::shared_ptr<MultigridHierarchy> mg_;
  std::shared_ptr<MultigridHierarchy> mg2h_;
  int coarse_maxit_;

  struct Direct;
  mutable std::shared_ptr<Direct> direct_;

  mutable Field f1_, f2_, f3_, ftl_, c1_, c2_, c3_, c4_;
  mutable std::vector<int> coarse_iters_;
  mutable int coarse_failures_ = 0;
  mutable double worst_coarse_res_ = 0.0;
  mutable long coarse_applies_ = 0;
  mutable long vcycles_base_ = 0;
};

/// One outer solve with the deflated preconditioner. The coarsest-level
/// counts of the V-cycles are frozen for standard GMRES; with gamma = 0 the
/// projected solution is corrected afterwards.
ConvergenceReport solve_deflated(const Deflation& d, OuterSolver s, Field& b, Field& x,
                                 const KrylovOptions& opt);

}  // namespace helmdef
