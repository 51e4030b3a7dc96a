#include "helmdef/mgcslp.hpp"

#include <optional>

#include "helmdef/transfer.hpp"

namespace helmdef {

void damped_jacobi(Field& u, Field& rhs, const StencilOperator& op, double omega, int steps,
                   bool zero_initial, Field* scratch) {
  const Field& dinv = op.inverse_diagonal();
  const auto d = dinv.cdata();
  const auto f = rhs.cdata();
  int s = 0;
  if (zero_initial && steps > 0) {
    auto x = u.data();
    for (std::size_t n = 0; n < x.size(); ++n) x[n] = omega * d[n] * f[n];
    ++s;
  }
  if (s >= steps) return;
  std::optional<Field> own;
  if (!scratch) own.emplace(u.layout_ptr());
  Field& t = scratch ? *scratch : *own;
  for (; s < steps; ++s) {
    op.apply(u, t);
    auto x = u.data();
    const auto mt = t.cdata();
    for (std::size_t n = 0; n < x.size(); ++n) {
      const cplx r = f[n] - mt[n];
      // omega * d * r without the library complex multiply
      const double re = d[n].real() * r.real() - d[n].imag() * r.imag();
      const double im = d[n].real() * r.imag() + d[n].imag() * r.real();
      x[n] += cplx(omega * re, omega * im);
    }
  }
}

MultigridHierarchy::MultigridHierarchy(const LayoutPtr& fine, const WavenumberField& k, BcKind bc,
                                       Shift shift, MgOptions opt)
    : bc_(bc), opt_(opt) {
  levels_.push_back({fine, k, make_shifted_laplacian(fine, k, bc, shift)});
  while (true) {
    const Level& last = levels_.back();
    const Grid2D& g = last.layout->grid();
    if (!g.coarsenable()) break;
    if (opt_.max_levels > 0 && levels() >= opt_.max_levels) break;
    const CartesianPartition cp = last.layout->partition().coarsened();
    const auto [mx, my] = cp.min_block();
    if (mx < opt_.min_block || my < opt_.min_block) break;
    LayoutPtr L = make_layout(coarsen_grid(g), cp, last.layout->halo());
    WavenumberField kc = last.k.coarsened();
    StencilOperatorPtr op = make_shifted_laplacian(L, kc, bc, shift);
    levels_.push_back({L, std::move(kc), std::move(op)});
  }
  for (const Level& lv : levels_) {
    rhs_.emplace_back(lv.layout);
    u_.emplace_back(lv.layout);
    r_.emplace_back(lv.layout);
    if (&lv != &levels_.back()) (void)lv.op->inverse_diagonal();
  }
}

void MultigridHierarchy::coarsest_solve() const {
  const int l = levels() - 1;
  const StencilOperator& op = *levels_[l].op;
  KrylovOptions ko;
  ko.tol = opt_.coarsest_tol;
  ko.maxit = opt_.coarsest_maxit;
  ko.verify_residual = false;
  if (opt_.freeze && frozen_ >= 0) ko.fixed_iterations = frozen_;
  u_[l].fill(0.0);
  const ConvergenceReport rep =
      gmres([&op](Field& x, Field& y) { op.apply(x, y); }, ApplyFn{}, rhs_[l], u_[l], ko);
  last_res_ = rep.history.empty() ? 0.0 : rep.history.back();
  if (opt_.freeze && frozen_ < 0) frozen_ = rep.iterations;
  if (ko.fixed_iterations < 0 && !rep.converged) ++failures_;
}

void MultigridHierarchy::cycle(int l) const {
  if (l == levels() - 1) {
    coarsest_solve();
    return;
  }
  const StencilOperator& op = *levels_[l].op;
  Field& u = u_[l];
  Field& f = rhs_[l];
  Field& r = r_[l];
  if (opt_.pre > 0) {
    damped_jacobi(u, f, op, opt_.omega, opt_.pre, true, &r);
  } else {
    u.fill(0.0);
  }
  op.apply(u, r);
  axpby(1.0, f, -1.0, r);
  restrict_field(TransferOrder::Low, bc_, r, rhs_[l + 1]);
  cycle(l + 1);
  prolong_field(TransferOrder::Low, bc_, u_[l + 1], r);
  axpy(1.0, r, u);
  if (opt_.post > 0) damped_jacobi(u, f, op, opt_.omega, opt_.post, false, &r);
}

void MultigridHierarchy::vcycle(Field& rhs, Field& out) const {
  ++cycles_;
  copy(rhs, rhs_[0]);
  cycle(0);
  copy(u_[0], out);
}

ApplyFn MultigridHierarchy::as_apply() const {
  return [this](Field& in, Field& out) { vcycle(in, out); };
}

MultigridPtr build_hierarchy(const LayoutPtr& fine, const WavenumberField& k, BcKind bc,
                             Shift shift, MgOptions opt) {
  if (!fine->grid().coarsenable())
    throw Error(ErrorKind::NotCoarsenable, "multigrid needs a fine grid that coarsens at least once");
  return std::make_shared<MultigridHierarchy>(fine, k, bc, shift, opt);
}

}  // namespace helmdef
