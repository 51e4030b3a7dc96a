#include <gtest/gtest.h>

#include "helmdef/krylov.hpp"
#include "oracle.hpp"

using namespace helmdef;

namespace {

ApplyFn dense_apply(const LayoutPtr& L, const oracle::Mat& A) {
  return [L, A](Field& in, Field& out) {
    const oracle::Vec y = A * oracle::vec(in);
    out.from_global(std::span<const cplx>(y.data(), static_cast<std::size_t>(y.size())));
  };
}

ApplyFn identity() {
  return [](Field& in, Field& out) { copy(in, out); };
}

oracle::Mat test_matrix(int n, std::uint32_t seed) {
  // diagonally shifted random complex matrix, nonsymmetric
  oracle::Mat A(n, n);
  for (int j = 0; j < n; ++j) A.col(j) = oracle::random_vector(n, seed + j);
  A += cplx(2.0 * n / 3, 1.0) * oracle::Mat::Identity(n, n);
  return A;
}

}  // namespace

TEST(Krylov, IdentityConvergesInOneStep) {
  auto L = oracle::square(5);
  for (OuterSolver s : {OuterSolver::Gmres, OuterSolver::Gcr, OuterSolver::Fgmres}) {
    Field b = oracle::random_field(L, 1), x(L);
    const ConvergenceReport r = krylov_solve(s, identity(), ApplyFn{}, b, x, {});
    EXPECT_EQ(r.iterations, 1) << to_string(s);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(max_abs_diff(x, b), 1e-14);
    EXPECT_EQ(r.history.front(), 1.0);
  }
}

TEST(Krylov, DenseSystems) {
  auto L = oracle::square(5);  // 25 unknowns
  const oracle::Mat A = test_matrix(25, 100);
  const oracle::Vec bv = oracle::random_vector(25, 2);
  const oracle::Vec exact = A.partialPivLu().solve(bv);
  const oracle::Mat Minv = A.diagonal().cwiseInverse().asDiagonal();
  for (OuterSolver s : {OuterSolver::Gmres, OuterSolver::Gcr, OuterSolver::Fgmres})
    for (bool pre : {false, true}) {
      Field b = oracle::field(L, bv), x(L);
      KrylovOptions o;
      o.tol = 1e-10;
      const ConvergenceReport r =
          krylov_solve(s, dense_apply(L, A), pre ? dense_apply(L, Minv) : ApplyFn{}, b, x, o);
      EXPECT_TRUE(r.converged);
      EXPECT_LE(r.iterations, 25);
      EXPECT_LT(oracle::rel_err(oracle::vec(x), exact), 1e-8) << to_string(s) << pre;
      EXPECT_LE(r.final_relres_true, 1e-9);
      EXPECT_EQ(static_cast<int>(r.history.size()), r.iterations + 1);
    }
}

TEST(Krylov, GmresHistoryMonotone) {
  auto L = oracle::square(5);
  const oracle::Mat A = test_matrix(25, 7);
  Field b = oracle::random_field(L, 3), x(L);
  KrylovOptions o;
  o.tol = 1e-12;
  const ConvergenceReport r = gmres(dense_apply(L, A), ApplyFn{}, b, x, o);
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1] * (1 + 1e-12));
}

TEST(Krylov, GmresMatchesMinimalResidual) {
  // after m steps GMRES minimises |b - A x| over the Krylov space
  auto L = oracle::square(5);
  const oracle::Mat A = test_matrix(25, 11);
  const oracle::Vec bv = oracle::random_vector(25, 4);
  oracle::Mat K(25, 4);
  K.col(0) = bv;
  for (int m = 1; m < 4; ++m) K.col(m) = A * K.col(m - 1);
  const oracle::Mat AK = A * K;
  const oracle::Vec y = AK.colPivHouseholderQr().solve(bv);
  const double best = (bv - AK * y).norm() / bv.norm();
  Field b = oracle::field(L, bv), x(L);
  KrylovOptions o;
  o.fixed_iterations = 4;
  const ConvergenceReport r = gmres(dense_apply(L, A), ApplyFn{}, b, x, o);
  EXPECT_EQ(r.iterations, 4);
  EXPECT_NEAR(r.history.back(), best, 1e-10);
}

TEST(Krylov, RestartedGmres) {
  auto L = oracle::square(5);
  const oracle::Mat A = test_matrix(25, 13);
  Field b = oracle::random_field(L, 5), x(L);
  KrylovOptions o;
  o.tol = 1e-10;
  o.restart = 5;
  o.maxit = 400;
  const ConvergenceReport r = gmres(dense_apply(L, A), ApplyFn{}, b, x, o);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.final_relres_true, 1e-9);
}

TEST(Krylov, ZeroRhs) {
  auto L = oracle::square(5);
  Field b(L), x(L);
  const ConvergenceReport r = gmres(identity(), ApplyFn{}, b, x, {});
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(norm2(x), 0.0);
}

TEST(Krylov, Parse) {
  EXPECT_EQ(parse_outer_solver("gmres"), OuterSolver::Gmres);
  EXPECT_EQ(parse_outer_solver("gcr"), OuterSolver::Gcr);
  EXPECT_EQ(parse_outer_solver("fgmres"), OuterSolver::Fgmres);
  EXPECT_THROW(parse_outer_solver("bicgstab"), Error);
}
