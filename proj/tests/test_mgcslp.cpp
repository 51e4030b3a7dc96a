#include <gtest/gtest.h>

#include "helmdef/assembly.hpp"
#include "helmdef/mgcslp.hpp"
#include "oracle.hpp"

using namespace helmdef;

namespace {

const Shift kCslp{1.0, -0.5};

// Dense V(1,1) cycle with an exact coarsest solve.
oracle::Vec dense_vcycle(const std::vector<WavenumberField>& ks, BcKind bc, double omega, std::size_t l,
                         const oracle::Vec& b) {
  const oracle::Mat M = oracle::dense(assemble_matrix(ks[l], bc, kCslp));
  if (l + 1 == ks.size()) return M.partialPivLu().solve(b);
  const oracle::Vec dinv = M.diagonal().cwiseInverse();
  const int n = ks[l].grid.nx;
  const oracle::Mat R = oracle::restriction(TransferOrder::Low, bc, n, n).cast<cplx>();
  const oracle::Mat P = oracle::prolongation(TransferOrder::Low, bc, n, n).cast<cplx>();
  oracle::Vec u = omega * dinv.cwiseProduct(b);
  u += P * dense_vcycle(ks, bc, omega, l + 1, R * (b - M * u));
  u += omega * dinv.cwiseProduct(b - M * u);
  return u;
}

}  // namespace

TEST(Multigrid, LevelCount) {
  auto L = oracle::square(33);
  MultigridHierarchy mg(L, constant_k(L->grid(), 20), BcKind::Sommerfeld, kCslp);
  ASSERT_EQ(mg.levels(), 5);
  const int sizes[] = {33, 17, 9, 5, 3};
  for (int l = 0; l < 5; ++l) {
    EXPECT_EQ(mg.level(l).layout->grid().nx, sizes[l]);
    for (double v : mg.level(l).k.k) EXPECT_EQ(v, 20.0);
  }
  // blocks of a 4x4 partition become too thin earlier
  auto P = oracle::square(33, 4, 4);
  EXPECT_LT(MultigridHierarchy(P, constant_k(P->grid(), 20), BcKind::Sommerfeld, kCslp).levels(), 5);
  MgOptions o;
  o.max_levels = 2;
  EXPECT_EQ(MultigridHierarchy(L, constant_k(L->grid(), 20), BcKind::Sommerfeld, kCslp, o).levels(), 2);
}

TEST(Multigrid, JacobiFixedPoint) {
  auto L = oracle::square(17, 2, 2);
  auto op = make_shifted_laplacian(L, constant_k(L->grid(), 20), BcKind::Sommerfeld, kCslp);
  Field u = oracle::random_field(L, 1), rhs(L), u0(L);
  op->apply(u, rhs);
  copy(u, u0);
  damped_jacobi(u, rhs, *op, 0.8, 3);
  EXPECT_LT(max_abs_diff(u, u0), 1e-12 * norm2(u0));
}

TEST(Multigrid, JacobiStepsMatchDense) {
  const int n = 9;
  auto L = oracle::square(n, 2, 1);
  const WavenumberField k = constant_k(L->grid(), 15);
  auto op = make_shifted_laplacian(L, k, BcKind::Sommerfeld, kCslp);
  const oracle::Mat M = oracle::dense(assemble_matrix(k, BcKind::Sommerfeld, kCslp));
  const oracle::Vec dinv = M.diagonal().cwiseInverse();
  const oracle::Vec b = oracle::random_vector(n * n, 2);
  Field rhs = oracle::field(L, b), u(L);
  u.fill(5.0);  // overwritten with zero_initial
  damped_jacobi(u, rhs, *op, 0.8, 1, true);
  EXPECT_LT(oracle::rel_err(oracle::vec(u), 0.8 * dinv.cwiseProduct(b)), 1e-14);
  damped_jacobi(u, rhs, *op, 0.8, 1);
  oracle::Vec e = 0.8 * dinv.cwiseProduct(b);
  e += 0.8 * dinv.cwiseProduct(b - M * e);
  EXPECT_LT(oracle::rel_err(oracle::vec(u), e), 1e-14);
}

TEST(Multigrid, VcycleMatchesDenseCycle) {
  for (BcKind bc : {BcKind::Dirichlet, BcKind::Sommerfeld}) {
    auto L = oracle::square(17, 2, 2);
    MgOptions o;
    o.coarsest_tol = 1e-13;
    MultigridHierarchy mg(L, constant_k(L->grid(), 12), bc, kCslp, o);
    std::vector<WavenumberField> ks;
    for (int l = 0; l < mg.levels(); ++l) ks.push_back(mg.level(l).k);
    const oracle::Vec b = oracle::random_vector(17 * 17, 3);
    Field rhs = oracle::field(L, b), out(L);
    mg.vcycle(rhs, out);
    EXPECT_LT(oracle::rel_err(oracle::vec(out), dense_vcycle(ks, bc, 0.8, 0, b)), 1e-10) << to_string(bc);
  }
}

TEST(Multigrid, ZeroRhs) {
  auto L = oracle::square(17);
  MultigridHierarchy mg(L, constant_k(L->grid(), 20), BcKind::Sommerfeld, kCslp);
  Field rhs(L), out(L);
  out.fill(1.0);
  mg.vcycle(rhs, out);
  EXPECT_EQ(norm2(out), 0.0);
}

TEST(Multigrid, FrozenCycleIsLinear) {
  auto L = oracle::square(33);
  MgOptions o;
  o.freeze = true;
  MultigridHierarchy mg(L, constant_k(L->grid(), 20), BcKind::Sommerfeld, kCslp, o);
  const oracle::Vec a = oracle::random_vector(33 * 33, 4), b = oracle::random_vector(33 * 33, 5);
  auto run = [&](const oracle::Vec& v) {
    Field r = oracle::field(L, v), out(L);
    mg.vcycle(r, out);
    return oracle::vec(out);
  };
  const oracle::Vec ra = run(a);
  EXPECT_GE(mg.frozen_iterations(), 0);
  const oracle::Vec rb = run(b);
  const cplx s(0.7, -0.2);
  EXPECT_LT(oracle::rel_err(run(a + s * b), ra + s * rb), 1e-12);
}

TEST(Multigrid, ContractsOnShiftedProblem) {
  auto L = oracle::square(17);
  const WavenumberField k = constant_k(L->grid(), 20);
  MultigridHierarchy mg(L, k, BcKind::Sommerfeld, kCslp);
  auto op = make_shifted_laplacian(L, k, BcKind::Sommerfeld, kCslp);
  // stationary iteration u <- u + V(b - M u)
  Field b = oracle::random_field(L, 6), u(L), r(L), c(L), Mu(L);
  double prev = norm2(b);
  for (int it = 0; it < 5; ++it) {
    op->apply(u, Mu);
    copy(b, r);
    axpy(-1.0, Mu, r);
    const double res = norm2(r);
    if (it > 0) EXPECT_LT(res, prev);
    prev = res;
    mg.vcycle(r, c);
    axpy(1.0, c, u);
  }
  op->apply(u, Mu);
  copy(b, r);
  axpy(-1.0, Mu, r);
  EXPECT_LT(norm2(r), 0.5 * norm2(b));
}
