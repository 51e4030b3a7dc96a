#pragma once

#include <Eigen/Sparse>

#include "helmdef/operators.hpp"

namespace helmdef {

using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using CVec = Eigen::VectorXcd;

constexpr int kOracleCap = 129;

/// Assembled five-point Helmholtz (shift (1,0)) or CSLP matrix, written
/// directly from the edge/corner formulas. Lexicographic order, i fastest.
/// Test oracle only; refuses grids larger than kOracleCap per direction.
SpMat assemble_matrix(const WavenumberField& k, BcKind bc, Shift shift = {});

/// Matrix of any stencil operator, read row by row from the operator.
SpMat operator_matrix(const StencilOperator& op);

CVec to_vector(const Field& f);
void from_vector(const CVec& v, Field& f);

}  // namespace helmdef
