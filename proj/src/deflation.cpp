#include "helmdef/deflation.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <cmath>
#include <random>

#include "helmdef/transfer.hpp"

namespace helmdef {

DeflationVariant parse_deflation(const std::string& s) {
  if (s == "adef1" || s == "ADEF1" || s == "A-DEF1") return DeflationVariant::ADEF1;
  if (s == "apd" || s == "APD") return DeflationVariant::APD;
  if (s == "tlkm" || s == "TLKM") return DeflationVariant::TLKM;
  throw Error(ErrorKind::ConfigError, "unknown deflation variant '" + s + "'");
}

const char* to_string(DeflationVariant v) {
  switch (v) {
    case DeflationVariant::ADEF1: return "adef1";
    case DeflationVariant::APD: return "apd";
    case DeflationVariant::TLKM: return "tlkm";
  }
  return "?";
}

CoarseSolveMode parse_coarse_mode(const std::string& s) {
  if (s == "plain" || s == "gmres") return CoarseSolveMode::Plain;
  if (s == "cslp" || s == "cslp-gmres") return CoarseSolveMode::Cslp;
  if (s == "direct") return CoarseSolveMode::Direct;
  throw Error(ErrorKind::ConfigError, "unknown coarse solver mode '" + s + "'");
}

const char* to_string(CoarseSolveMode m) {
  switch (m) {
    case CoarseSolveMode::Plain: return "plain";
    case CoarseSolveMode::Cslp: return "cslp";
    case CoarseSolveMode::Direct: return "direct";
  }
  return "?";
}

int default_coarse_maxit(std::size_t coarse_points) {
  return std::max(1, static_cast<int>(std::ceil(4.0 * std::sqrt(static_cast<double>(coarse_points)))));
}

struct Deflation::Direct {
  bool sparse = false;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
  Eigen::SparseMatrix<cplx> S;
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> slu;
};

namespace {
// stencil radius assumed by the coloured probing of the coarse operator
constexpr int kProbeRadius = 3;
constexpr std::size_t kDenseLimit = 6000;
}  // namespace

Deflation::Deflation(const LayoutPtr& fine, const WavenumberField& k, BcKind bc, DeflationConfig cfg)
    : fine_(fine), k_(k), bc_(bc), cfg_(cfg) {
  if (!std::isfinite(cfg_.gamma)) throw Error(ErrorKind::ConfigError, "gamma must be finite");
  if (!(cfg_.coarse_tol > 0.0 && cfg_.coarse_tol < 1.0))
    throw Error(ErrorKind::ConfigError, "coarse tolerance must lie in (0, 1)");
  const Grid2D& g = fine->grid();
  if (!g.coarsenable()) throw Error(ErrorKind::NotCoarsenable, "deflation needs a coarsenable fine grid");
  transfer_ = cfg_.transfer ? *cfg_.transfer
                            : (cfg_.variant == DeflationVariant::APD ? TransferOrder::High
                                                                      : TransferOrder::Low);
  const CartesianPartition cp = fine->partition().coarsened();
  coarse_layout_ = make_layout(coarsen_grid(g), cp, std::max(fine->halo(), required_halo(cfg_.coarse_op)));
  a_ = make_helmholtz(fine, k, bc);
  mg_ = std::make_shared<MultigridHierarchy>(fine, k, bc, cfg_.shift, cfg_.mg);

  CoarseContext ctx;
  ctx.fine_layout = fine;
  ctx.coarse_layout = coarse_layout_;
  ctx.k_fine = k;
  ctx.bc = bc;
  ctx.transfer = transfer_;
  ctx.fine_op = a_;
  ctx.scale = cfg_.variant == DeflationVariant::TLKM ? CoarseScale::Unit : cfg_.coarse_scale;
  ctx.nine_point = cfg_.nine_point;
  ctx.memoize_stencils = cfg_.memoize_stencils;
  a2h_ = make_coarse_operator(cfg_.coarse_op, ctx);

  if (cfg_.coarse_mode == CoarseSolveMode::Cslp || cfg_.variant == DeflationVariant::TLKM) {
    mg2h_ = std::make_shared<MultigridHierarchy>(coarse_layout_, k.coarsened(), bc, cfg_.shift, cfg_.mg);
  }
  coarse_maxit_ = cfg_.coarse_maxit > 0 ? cfg_.coarse_maxit
                                        : default_coarse_maxit(coarse_layout_->grid().points());
  f1_ = Field(fine);
  f2_ = Field(fine);
  f3_ = Field(fine);
  ftl_ = Field(fine);
  c1_ = Field(coarse_layout_);
  c2_ = Field(coarse_layout_);
  c3_ = Field(coarse_layout_);
  c4_ = Field(coarse_layout_);
}

void Deflation::apply_A(Field& x, Field& y) const { a_->apply(x, y); }

void Deflation::coarse_matvec(Field& x, Field& y) const {
  ++coarse_applies_;
  if (cfg_.variant != DeflationVariant::TLKM) {
    a2h_->apply(x, y);
    return;
  }
  // R P M_2h^-1 A_2h x
  a2h_->apply(x, c3_);
  mg2h_->vcycle(c3_, c4_);
  prolong_field(transfer_, bc_, c4_, ftl_);
  restrict_field(transfer_, bc_, ftl_, y);
}

void Deflation::build_direct() const {
  const Grid2D& g = coarse_layout_->grid();
  const auto n = static_cast<Eigen::Index>(g.points());
  Field e(coarse_layout_), col(coarse_layout_);
  std::vector<cplx> unit(g.points(), 0.0);
  direct_ = std::make_shared<Direct>();
  if (cfg_.variant == DeflationVariant::TLKM) {
    // the composite operator is not local, probe column by column
    if (g.points() > kDenseLimit)
      throw Error(ErrorKind::GridTooLarge, "direct TLKM coarse solve is limited to 6000 coarse points");
    // unit probes must not fix the coarsest iteration count of the 2h cycle
    const bool frozen = mg2h_->options().freeze;
    mg2h_->set_freeze(false);
    Eigen::MatrixXcd E(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      unit[static_cast<std::size_t>(c)] = 1.0;
      e.from_global(unit);
      unit[static_cast<std::size_t>(c)] = 0.0;
      coarse_matvec(e, col);
      const std::vector<cplx> v = col.to_global();
      for (Eigen::Index r = 0; r < n; ++r) E(r, c) = v[static_cast<std::size_t>(r)];
    }
    mg2h_->set_freeze(frozen);
    direct_->lu.compute(E);
    return;
  }
  const int stride = 2 * kProbeRadius + 1;
  std::vector<Eigen::Triplet<cplx>> trips;
  for (int cy = 0; cy < stride; ++cy) {
    for (int cx = 0; cx < stride; ++cx) {
      std::fill(unit.begin(), unit.end(), cplx{});
      for (int j = cy; j < g.ny; j += stride)
        for (int i = cx; i < g.nx; i += stride) unit[g.linear(i, j)] = 1.0;
      e.from_global(unit);
      coarse_matvec(e, col);
      const std::vector<cplx> v = col.to_global();
      for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
          const cplx a = v[g.linear(i, j)];
          if (a == cplx{}) continue;
          int di = ((cx - i) % stride + stride) % stride;
          int dj = ((cy - j) % stride + stride) % stride;
          if (di > kProbeRadius) di -= stride;
          if (dj > kProbeRadius) dj -= stride;
          trips.emplace_back(static_cast<int>(g.linear(i, j)),
                             static_cast<int>(g.linear(i + di, j + dj)), a);
        }
      }
    }
  }
  direct_->S.resize(n, n);
  direct_->S.setFromTriplets(trips.begin(), trips.end());
  direct_->S.makeCompressed();
  // a wider coupling than the probing radius would alias; check on a random vector
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (cplx& u : unit) u = cplx(U(rng), U(rng));
  e.from_global(unit);
  coarse_matvec(e, col);
  const std::vector<cplx> v = col.to_global();
  Eigen::Map<const Eigen::VectorXcd> uv(unit.data(), n), av(v.data(), n);
  const double err = (direct_->S * uv - av).norm() / std::max(av.norm(), 1e-300);
  if (err > 1e-10)
    throw Error(ErrorKind::IncompatibleFootprints, "coarse operator is wider than the probing radius");
  direct_->slu.compute(direct_->S);
  if (direct_->slu.info() != Eigen::Success)
    throw Error(ErrorKind::SingularSystem, "sparse LU of the coarse operator failed");
  direct_->sparse = true;
}

void Deflation::coarse_solve(Field& rhs, Field& out) const {
  if (cfg_.coarse_mode == CoarseSolveMode::Direct) {
    if (!direct_) build_direct();
    const std::vector<cplx> r = rhs.to_global();
    Eigen::Map<const Eigen::VectorXcd> rv(r.data(), static_cast<Eigen::Index>(r.size()));
    const Eigen::VectorXcd x = direct_->sparse ? Eigen::VectorXcd(direct_->slu.solve(rv))
                                               : Eigen::VectorXcd(direct_->lu.solve(rv));
    out.from_global(std::span<const cplx>(x.data(), static_cast<std::size_t>(x.size())));
    coarse_iters_.push_back(0);
    return;
  }
  KrylovOptions ko;
  ko.tol = cfg_.coarse_tol;
  ko.maxit = coarse_maxit_;
  ko.verify_residual = false;
  ApplyFn A = [this](Field& x, Field& y) { coarse_matvec(x, y); };
  ApplyFn M;
  if (cfg_.coarse_mode == CoarseSolveMode::Cslp) M = mg2h_->as_apply();
  out.fill(0.0);
  const ConvergenceReport rep = gmres(A, M, rhs, out, ko);
  coarse_iters_.push_back(rep.iterations);
  if (!rep.converged) {
    ++coarse_failures_;
    worst_coarse_res_ = std::max(worst_coarse_res_, rep.history.back());
  }
}

void Deflation::apply_Q(Field& v, Field& out) const {
  restrict_field(transfer_, bc_, v, c1_);
  coarse_solve(c1_, c2_);
  prolong_field(transfer_, bc_, c2_, out);
}

void Deflation::apply_P_shifted(Field& v, Field& out, double gamma) const {
  apply_Q(v, f1_);
  a_->apply(f1_, out);
  axpby(1.0, v, -1.0, out);
  axpy(cfg_.gamma_sign * gamma, f1_, out);
}

void Deflation::apply_adef1(Field& v, Field& out) const {
  apply_Q(v, f1_);
  a_->apply(f1_, f2_);
  axpby(1.0, v, -1.0, f2_);
  mg_->vcycle(f2_, out);
  axpy(cfg_.gamma_sign * cfg_.gamma, f1_, out);
}

void Deflation::apply_tlkm(Field& v, Field& out) const {
  mg_->vcycle(v, f1_);
  apply_Q(f1_, f2_);
  a_->apply(f2_, f3_);
  mg_->vcycle(f3_, out);
  axpby(1.0, f1_, -1.0, out);
  axpy(cfg_.gamma_sign * cfg_.gamma, f2_, out);
}

void Deflation::apply(Field& v, Field& out) const {
  if (cfg_.variant == DeflationVariant::TLKM) {
    apply_tlkm(v, out);
  } else {
    apply_adef1(v, out);
  }
}

ApplyFn Deflation::preconditioner() const {
  return [this](Field& in, Field& out) { apply(in, out); };
}

void Deflation::solution_correction(Field& u_hat, Field& b, Field& out) const {
  apply_Q(b, out);
  a_->apply(u_hat, f3_);
  apply_Q(f3_, f2_);
  axpy(1.0, u_hat, out);
  axpy(-1.0, f2_, out);
}

void Deflation::reset_stats() const {
  coarse_iters_.clear();
  coarse_failures_ = 0;
  worst_coarse_res_ = 0.0;
  coarse_applies_ = 0;
  vcycles_base_ = mg_->cycles();
}

long Deflation::fine_vcycles() const { return mg_->cycles() - vcycles_base_; }

void Deflation::freeze_vcycles(bool on) const {
  mg_->set_freeze(on);
  if (mg2h_) mg2h_->set_freeze(on);
}

ConvergenceReport solve_deflated(const Deflation& d, OuterSolver s, Field& b, Field& x,
                                 const KrylovOptions& opt) {
  d.reset_stats();
  const bool freeze = s == OuterSolver::Gmres;
  d.freeze_vcycles(freeze);
  ApplyFn A = [&d](Field& in, Field& out) { d.apply_A(in, out); };
  ConvergenceReport rep = krylov_solve(s, A, d.preconditioner(), b, x, opt);
  if (d.config().gamma == 0.0) {
    Field u(x.layout_ptr());
    d.solution_correction(x, b, u);
    copy(u, x);
    if (opt.verify_residual) {
      Field r(x.layout_ptr());
      d.apply_A(x, r);
      axpby(1.0, b, -1.0, r);
      const double bn = norm2(b);
      rep.final_relres_true = bn > 0.0 ? norm2(r) / bn : 0.0;
    }
  }
  rep.coarse_iterations = d.coarse_iterations();
  const std::int64_t M = static_cast<std::int64_t>(d.coarse_layout()->grid().points());
  const std::int64_t N = static_cast<std::int64_t>(x.grid().points());
  rep.flops = d.coarse_applications() * flops_estimate(d.config().coarse_op, M, N);
  if (d.coarse_failures() > 0)
    rep.warnings.push_back("CoarseSolveFailed: " + std::to_string(d.coarse_failures()) +
                           " coarse solves stopped at the cap, worst residual " +
                           std::to_string(d.worst_coarse_residual()));
  d.freeze_vcycles(false);
  return rep;
}

}  // namespace helmdef
