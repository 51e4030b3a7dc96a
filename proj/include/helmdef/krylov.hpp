#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "helmdef/field.hpp"

namespace helmdef {

/// out = Op(in). Implementations may exchange the halos of `in`.
using ApplyFn = std::function<void(Field& in, Field& out)>;

struct KrylovOptions {
  double tol = 1e-6;
  int maxit = 1000;
  int restart = 0;            // GMRES/FGMRES: 0 = full
  int truncation = 0;         // GCR: 0 = keep every direction
  int fixed_iterations = -1;  // >= 0: run exactly this many steps, ignore tol
  bool verify_residual = true;  // recompute the final residual(s) explicitly
  double reorth_threshold = 1e-8;
};

struct ConvergenceReport {
  int iterations = 0;
  bool converged = false;
  bool breakdown = false;
  /// Relative residual per iteration, history[0] = 1 unless b = 0. The
  /// preconditioned residual for GMRES, the true one for GCR/FGMRES.
  std::vector<double> history;
  double final_relres_precond = 0.0;
  double final_relres_true = 0.0;
  double wall_time = 0.0;
  int reorthogonalisations = 0;
  /// Filled by callers that run inner solves inside the preconditioner.
  std::vector<int> coarse_iterations;
  std::int64_t flops = 0;
  std::vector<std::string> warnings;
};

/// Full GMRES with left preconditioning: stops on |M(b - A x)| / |M b|.
/// Modified Gram-Schmidt with one conditional reorthogonalisation pass,
/// Givens rotations for the least-squares problem. `precond` may be empty.
/// x carries the initial guess in and the solution out.
ConvergenceReport gmres(const ApplyFn& A, const ApplyFn& precond, Field& b, Field& x,
                        const KrylovOptions& opt);

/// GCR with right preconditioning, stopping on the true residual. Any
/// (even non-linear) preconditioner is admissible.
ConvergenceReport gcr(const ApplyFn& A, const ApplyFn& precond, Field& b, Field& x,
                      const KrylovOptions& opt);

/// Flexible GMRES (right preconditioning, true residual).
ConvergenceReport fgmres(const ApplyFn& A, const ApplyFn& precond, Field& b, Field& x,
                         const KrylovOptions& opt);

enum class OuterSolver { Gmres, Gcr, Fgmres };
OuterSolver parse_outer_solver(const std::string& s);
const char* to_string(OuterSolver s);

ConvergenceReport krylov_solve(OuterSolver s, const ApplyFn& A, const ApplyFn& precond, Field& b,
                               Field& x, const KrylovOptions& opt);

}  // namespace helmdef
