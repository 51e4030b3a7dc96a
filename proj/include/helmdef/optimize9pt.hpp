#pragma once

#include "helmdef/coarse.hpp"

namespace helmdef {

struct MinMode {
  int i = 0;
  int j = 0;
  double value = 0.0;  // (i^2 + j^2) pi^2 - k^2
};

/// Continuous Dirichlet mode on the unit square whose eigenvalue is closest
/// to zero, by exhaustive search over i, j >= 1. Ties keep the first hit in
/// (i, j) lexicographic order.
MinMode find_min_mode(double k);

/// Discrete eigenvalue of the nine-point scheme with coefficients c at mesh
/// width H for the sine mode (p, q) on the unit square.
double nine_point_eigenvalue(const NinePointCoeffs& c, double k, double H, int p, int q);

/// Fit a0, as, ac (b0 = 1, bs = bc = 0) so that the scheme is consistent
/// (a0 + 4 as + 4 ac = 0, as + 2 ac = -1) and the discrete eigenvalue of mode
/// (p, q) on the coarse grid of width 2 h_ref equals `target`. Throws
/// SingularSystem when the alignment row depends on the constraints.
NinePointCoeffs optimize_9pt_coefficients(double k, double h_ref, int p, int q,
                                          double target = -4.5);

/// Same fit with ac rounded to `digits` decimals and the two constraints
/// re-imposed, so the printed three-digit coefficients are reproduced.
NinePointCoeffs round_9pt_coefficients(const NinePointCoeffs& c, int digits = 3);

}  // namespace helmdef
