#pragma once

#include <memory>
#include <vector>

#include "helmdef/krylov.hpp"
#include "helmdef/media.hpp"
#include "helmdef/operators.hpp"

namespace helmdef {

struct MgOptions {
  double omega = 0.8;
  int pre = 1;
  int post = 1;
  double coarsest_tol = 1e-8;
  int coarsest_maxit = 500;
  /// Reuse the coarsest iteration count of the first cycle after
  /// reset_freeze(), so that the cycle is a fixed linear map.
  bool freeze = false;
  int min_block = 2;
  int max_levels = 0;  // 0: coarsen as far as the grid allows
};

/// u <- u + omega D^-1 (rhs - M u), `steps` times. With zero_initial the
/// first step skips the residual evaluation and overwrites u. `scratch`, if
/// given, must share u's layout.
void damped_jacobi(Field& u, Field& rhs, const StencilOperator& op, double omega, int steps,
                   bool zero_initial = false, Field* scratch = nullptr);

/// CSLP hierarchy with re-discretised five-point operators on every level.
/// A grid that cannot be coarsened gives a single level, on which the cycle
/// reduces to the coarsest GMRES solve.
class MultigridHierarchy {
 public:
  struct Level {
    LayoutPtr layout;
    WavenumberField k;
    StencilOperatorPtr op;
  };

  MultigridHierarchy(const LayoutPtr& fine, const WavenumberField& k, BcKind bc, Shift shift,
                     MgOptions opt = {});

  int levels() const { return static_cast<int>(levels_.size()); }
  const Level& level(int l) const { return levels_[l]; }
  const MgOptions& options() const { return opt_; }
  BcKind bc() const { return bc_; }

  /// out = one V(pre, post) cycle applied to rhs, zero initial guess.
  void vcycle(Field& rhs, Field& out) const;
  ApplyFn as_apply() const;

  void set_freeze(bool on) { opt_.freeze = on; frozen_ = -1; }
  void reset_freeze() const { frozen_ = -1; }
  int frozen_iterations() const { return frozen_; }

  /// Coarsest solves that stopped at the cap above tolerance.
  int coarsest_failures() const { return failures_; }
  double last_coarsest_residual() const { return last_res_; }
  long cycles() const { return cycles_; }

 private:
  void cycle(int l) const;
  void coarsest_solve() const;

  std::vector<Level> levels_;
  BcKind bc_;
  MgOptions opt_;
  // per level work vectors: rhs, solution, residual / correction
  mutable std::vector<Field> rhs_, u_, r_;
  mutable int frozen_ = -1;
  mutable int failures_ = 0;
  mutable double last_res_ = 0.0;
  mutable long cycles_ = 0;
};

using MultigridPtr = std::shared_ptr<const MultigridHierarchy>;

/// Throws NotCoarsenable when the fine grid cannot be coarsened once.
MultigridPtr build_hierarchy(const LayoutPtr& fine, const WavenumberField& k, BcKind bc,
                             Shift shift, MgOptions opt = {});

}  // namespace helmdef
