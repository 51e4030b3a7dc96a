#pragma once

// Independent reference implementations for the tests: dense transfer
// matrices from the 1D stencils, random fields, small helpers.

#include <Eigen/Dense>
#include <cstdint>

#include "helmdef/assembly.hpp"
#include "helmdef/field.hpp"
#include "helmdef/transfer.hpp"

namespace oracle {

using helmdef::cplx;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using Vec = Eigen::VectorXcd;

helmdef::LayoutPtr layout(int nx, int ny, int px = 1, int py = 1, int halo = 3,
                          helmdef::Extents e = {});
inline helmdef::LayoutPtr square(int n, int px = 1, int py = 1) { return layout(n, n, px, py); }

helmdef::Field random_field(const helmdef::LayoutPtr& L, std::uint32_t seed);
Vec random_vector(Eigen::Index n, std::uint32_t seed);

Vec vec(const helmdef::Field& f);
helmdef::Field field(const helmdef::LayoutPtr& L, const Vec& v);

double rel_err(const Vec& a, const Vec& b);

/// 1D interpolation n_c -> n_f = 2 n_c - 1 (columns: coarse points).
RMat prolong_1d(helmdef::TransferOrder t, int nc);

/// Dense transfer matrices on a (2 nc - 1)^2 style grid, lexicographic with
/// i fastest. Dirichlet: boundary and interior are decoupled, boundary
/// values are injected / linearly interpolated along the boundary lines.
RMat prolongation(helmdef::TransferOrder t, helmdef::BcKind bc, int nxf, int nyf);
RMat restriction(helmdef::TransferOrder t, helmdef::BcKind bc, int nxf, int nyf);

Mat dense(const helmdef::SpMat& A);

}  // namespace oracle
