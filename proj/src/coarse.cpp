#include "helmdef/coarse.hpp"

#include <cctype>
#include <array>
#include <cmath>

namespace helmdef {

const char* to_string(CoarseOpVariant v) {
  switch (v) {
    case CoarseOpVariant::StrGlk: return "str-Glk";
    case CoarseOpVariant::StclOpGlk: return "stcl-op-Glk";
    case CoarseOpVariant::ReD_O2: return "ReD-O2";
    case CoarseOpVariant::ReD_O4: return "ReD-O4";
    case CoarseOpVariant::ReD_O6: return "ReD-O6";
    case CoarseOpVariant::ReD_cmpO4: return "ReD-cmpO4";
    case CoarseOpVariant::ReD_Glk1: return "ReD-Glk1";
    case CoarseOpVariant::ReD_Glk2: return "ReD-Glk2";
    case CoarseOpVariant::ReD_9ptO2: return "ReD-9ptO2";
  }
  return "?";
}

CoarseOpVariant parse_coarse_op(const std::string& s) {
  for (CoarseOpVariant v :
       {CoarseOpVariant::StrGlk, CoarseOpVariant::StclOpGlk, CoarseOpVariant::ReD_O2,
        CoarseOpVariant::ReD_O4, CoarseOpVariant::ReD_O6, CoarseOpVariant::ReD_cmpO4,
        CoarseOpVariant::ReD_Glk1, CoarseOpVariant::ReD_Glk2, CoarseOpVariant::ReD_9ptO2}) {
    std::string name = to_string(v);
    std::string alt;
    for (char c : name) alt += (c == '-') ? '_' : static_cast<char>(std::tolower(c));
    std::string low;
    for (char c : s) low += (c == '-') ? '_' : static_cast<char>(std::tolower(c));
    if (low == alt) return v;
  }
  throw Error(ErrorKind::ConfigError, "unknown coarse operator '" + s + "'");
}

int required_halo(CoarseOpVariant v) {
  switch (v) {
    case CoarseOpVariant::ReD_O2:
    case CoarseOpVariant::ReD_cmpO4:
    case CoarseOpVariant::ReD_9ptO2: return 1;
    case CoarseOpVariant::ReD_O6: return 3;
    default: return 2;
  }
}

CoarseScale parse_coarse_scale(const std::string& s) {
  if (s == "auto") return CoarseScale::Auto;
  if (s == "literal") return CoarseScale::Literal;
  if (s == "unit") return CoarseScale::Unit;
  throw Error(ErrorKind::ConfigError, "unknown coarse scale '" + s + "'");
}

const char* to_string(CoarseScale s) {
  switch (s) {
    case CoarseScale::Auto: return "auto";
    case CoarseScale::Literal: return "literal";
    case CoarseScale::Unit: return "unit";
  }
  return "?";
}

NinePointCoeffs compact_o4_coeffs(double gamma) {
  NinePointCoeffs c;
  c.a0 = 10.0 / 3.0;
  c.as = -2.0 / 3.0;
  c.ac = -1.0 / 6.0;
  c.b0 = 2.0 / 3.0 + gamma / 36.0;
  c.bs = 1.0 / 12.0 - gamma / 72.0;
  c.bc = gamma / 144.0;
  return c;
}

NinePointCoeffs nine_point_o2_printed() { return {4.632, -1.316, 0.158, 1.0, 0.0, 0.0}; }

InteriorStencil red_o2(double H) { return five_point(H); }

namespace {

InteriorStencil cross(double H, const std::vector<double>& w, double denom) {
  // w holds the one-sided second-difference weights w[0] (centre), w[1..r]
  const int r = static_cast<int>(w.size()) - 1;
  const double s = 1.0 / (denom * H * H);
  InteriorStencil st;
  st.radius = r;
  st.lap.push_back({0, 0, 2.0 * w[0] * s});
  for (int m = 1; m <= r; ++m) {
    st.lap.push_back({-m, 0, w[m] * s});
    st.lap.push_back({m, 0, w[m] * s});
    st.lap.push_back({0, -m, w[m] * s});
    st.lap.push_back({0, m, w[m] * s});
  }
  st.mass = {{0, 0, 1.0}};
  st.mass_factor = -1.0;
  return st;
}

}  // namespace

InteriorStencil red_o4(double H) { return cross(H, {30.0, -16.0, 1.0}, 12.0); }

InteriorStencil red_o6(double H) { return cross(H, {245.0, -135.0, 13.5, -1.0}, 90.0); }

InteriorStencil red_nine_point(double H, const NinePointCoeffs& c) {
  const double s = 1.0 / (H * H);
  InteriorStencil st;
  st.radius = 1;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      const int kind = std::abs(dx) + std::abs(dy);
      const double a = kind == 0 ? c.a0 : (kind == 1 ? c.as : c.ac);
      const double b = kind == 0 ? c.b0 : (kind == 1 ? c.bs : c.bc);
      if (a != 0.0) st.lap.push_back({dx, dy, a * s});
      if (b != 0.0) st.mass.push_back({dx, dy, b});
    }
  st.mass_factor = -1.0;
  return st;
}

InteriorStencil red_glk(double H) {
  const IStencil& L = glk_laplacian_reference();
  const IStencil& K = glk_mass_reference();
  InteriorStencil st;
  st.radius = 2;
  const double ls = 1.0 / (4.0 * 256.0 * H * H);
  const double ms = 1.0 / (4.0 * 4096.0);
  for (int dy = -2; dy <= 2; ++dy)
    for (int dx = -2; dx <= 2; ++dx) {
      st.lap.push_back({dx, dy, static_cast<double>(L.at(dx, dy)) * ls});
      st.mass.push_back({dx, dy, static_cast<double>(K.at(dx, dy)) * ms});
    }
  st.mass_factor = -1.0;
  return st;
}

std::int64_t flops_estimate(CoarseOpVariant v, std::int64_t M, std::int64_t N) {
  switch (v) {
    case CoarseOpVariant::StrGlk: return 50 * M + 10 * N + 18 * N;
    case CoarseOpVariant::StclOpGlk: return (50 + 1740) * M;
    case CoarseOpVariant::ReD_O2: return 10 * M;
    case CoarseOpVariant::ReD_O4:
    case CoarseOpVariant::ReD_cmpO4:
    case CoarseOpVariant::ReD_9ptO2: return 18 * M;
    case CoarseOpVariant::ReD_O6: return 26 * M;
    case CoarseOpVariant::ReD_Glk1:
    case CoarseOpVariant::ReD_Glk2: return 50 * M;
  }
  return 0;
}

namespace {

class StencilCoarse final : public CoarseOperator {
 public:
  StencilCoarse(CoarseOpVariant v, StencilOperatorPtr op) : v_(v), op_(std::move(op)) {}
  CoarseOpVariant variant() const override { return v_; }
  const LayoutPtr& layout() const override { return op_->layout_ptr(); }
  void apply(Field& x, Field& y) const override { op_->apply(x, y); }
  std::vector<Tap> row(int i, int j) const override { return op_->row(i, j); }
  const StencilOperatorPtr& op() const { return op_; }

 private:
  CoarseOpVariant v_;
  StencilOperatorPtr op_;
};

class StrGlkCoarse final : public CoarseOperator {
 public:
  explicit StrGlkCoarse(const CoarseContext& c)
      : ctx_(c), pf_(c.fine_layout), af_(c.fine_layout) {}
  CoarseOpVariant variant() const override { return CoarseOpVariant::StrGlk; }
  const LayoutPtr& layout() const override { return ctx_.coarse_layout; }
  void apply(Field& x, Field& y) const override {
    prolong_field(ctx_.transfer, ctx_.bc, x, pf_);
    ctx_.fine_op->apply(pf_, af_);
    restrict_field(ctx_.transfer, ctx_.bc, af_, y);
  }
  std::vector<Tap> row(int, int) const override {
    throw Error(ErrorKind::MissingFineContext, "str-Glk has no explicit row");
  }

 private:
  CoarseContext ctx_;
  mutable Field pf_;
  mutable Field af_;
};

// Galerkin stencil recomposed from the transfer and fine-operator rows at
// every coarse point, on every application.
class StclOpGlkCoarse final : public CoarseOperator {
 public:
  explicit StclOpGlkCoarse(const CoarseContext& c) : ctx_(c) {
    if (ctx_.coarse_layout->halo() < 2) {
      throw Error(ErrorKind::IncompatibleFootprints, "stcl-op-Glk needs coarse halo 2");
    }
    if (ctx_.memoize_stencils) {
      const Grid2D& gc = ctx_.coarse_layout->grid();
      memo_.resize(gc.points());
      for (int j = 0; j < gc.ny; ++j)
        for (int i = 0; i < gc.nx; ++i) memo_[static_cast<std::size_t>(j) * gc.nx + i] = compose(i, j);
    }
  }
  CoarseOpVariant variant() const override { return CoarseOpVariant::StclOpGlk; }
  const LayoutPtr& layout() const override { return ctx_.coarse_layout; }

  using Local = std::array<cplx, 25>;

  Local compose(int ic, int jc) const {
    Local acc{};
    const Grid2D& gf = ctx_.fine_layout->grid();
    for (const GTap& r : restriction_row(ctx_.transfer, ctx_.bc, gf, ic, jc)) {
      for (const Tap& a : ctx_.fine_op->row(r.i, r.j)) {
        const cplx ra = r.w * a.c;
        for (const GTap& p : prolongation_row(ctx_.transfer, ctx_.bc, gf, r.i + a.di, r.j + a.dj)) {
          const int dx = p.i - ic;
          const int dy = p.j - jc;
          acc[static_cast<std::size_t>((dy + 2) * 5 + dx + 2)] += ra * p.w;
        }
      }
    }
    return acc;
  }

  void apply(Field& x, Field& y) const override {
    x.exchange_halos();
    const Layout& L = *ctx_.coarse_layout;
    const Grid2D& gc = L.grid();
    const cplx* xs = x.cdata().data();
    cplx* ys = y.data().data();
    for_each_block(L, [&](int b) {
      const Layout::Block& B = L.block(b);
      for (int j = B.yr.lo; j < B.yr.hi; ++j)
        for (int i = B.xr.lo; i < B.xr.hi; ++i) {
          const Local st = memo_.empty() ? compose(i, j) : memo_[static_cast<std::size_t>(j) * gc.nx + i];
          cplx s = 0.0;
          for (int dy = -2; dy <= 2; ++dy)
            for (int dx = -2; dx <= 2; ++dx) {
              const cplx c = st[static_cast<std::size_t>((dy + 2) * 5 + dx + 2)];
              if (c != 0.0) s += c * xs[L.index(b, i - B.xr.lo + dx, j - B.yr.lo + dy)];
            }
          ys[L.index(b, i - B.xr.lo, j - B.yr.lo)] = s;
        }
    });
    y.mark_fresh(false);
  }

  std::vector<Tap> row(int i, int j) const override {
    const Local st = compose(i, j);
    std::vector<Tap> out;
    for (int dy = -2; dy <= 2; ++dy)
      for (int dx = -2; dx <= 2; ++dx) {
        const cplx c = st[static_cast<std::size_t>((dy + 2) * 5 + dx + 2)];
        if (c != 0.0) out.push_back({dx, dy, c});
      }
    return out;
  }

 private:
  CoarseContext ctx_;
  std::vector<Local> memo_;
};

StencilOperatorPtr build_red(CoarseOpVariant v, const CoarseContext& ctx) {
  const Grid2D& gc = ctx.coarse_layout->grid();
  const double H = gc.h;
  const WavenumberField kc = ctx.k_fine.coarsened();
  const double mass = restriction_mass(ctx.transfer);
  const bool dir = ctx.bc == BcKind::Dirichlet;
  // Literal stencils pair with the transposed prolongation as restriction,
  // i.e. with R scaled by transfer_sigma; fold that factor into A_2h here.
  // The Galerkin-derived stencil is written at restriction mass 4 while the
  // second-order rows next to the boundary keep their own scale, so in this
  // mode the Glk variants mix two scales near the boundary.
  const double sigma = transfer_sigma(ctx.transfer);
  double so = 1.0;
  double sg = 1.0;
  switch (ctx.scale) {
    case CoarseScale::Auto: so = sg = mass; break;
    case CoarseScale::Literal:
      so = 1.0 / sigma;
      sg = 4.0 / sigma;
      break;
    case CoarseScale::Unit: break;
  }

  InteriorStencil o2 = red_o2(H).scaled(so);
  InteriorStencil main;
  int radius = 1;
  int fallback_layers = 0;  // layers next to the boundary that use o2
  GhostRule ghost = dir ? GhostRule::None : GhostRule::Sommerfeld2;
  GhostK gk = GhostK::Clamp;
  switch (v) {
    case CoarseOpVariant::ReD_O2: main = o2; break;
    case CoarseOpVariant::ReD_O4:
      main = red_o4(H).scaled(so);
      radius = 2;
      fallback_layers = 2;
      break;
    case CoarseOpVariant::ReD_O6:
      main = red_o6(H).scaled(so);
      radius = 3;
      fallback_layers = 3;
      break;
    case CoarseOpVariant::ReD_cmpO4:
      main = red_nine_point(H, compact_o4_coeffs(1.0)).scaled(so);
      if (!dir) ghost = GhostRule::Sommerfeld4;
      break;
    case CoarseOpVariant::ReD_9ptO2:
      main = red_nine_point(H, ctx.nine_point).scaled(so);
      if (!dir) ghost = GhostRule::Sommerfeld2Avg;
      break;
    case CoarseOpVariant::ReD_Glk1:
      main = red_glk(H).scaled(sg);
      radius = 2;
      fallback_layers = 2;
      break;
    case CoarseOpVariant::ReD_Glk2:
      main = red_glk(H).scaled(sg);
      radius = 2;
      fallback_layers = 1;
      ghost = dir ? GhostRule::DirichletLinear : GhostRule::Sommerfeld2;
      gk = GhostK::Zero;
      break;
    default: throw Error(ErrorKind::MissingFineContext, "not a re-discretised variant");
  }
  if (radius > ctx.coarse_layout->halo()) {
    throw Error(ErrorKind::IncompatibleFootprints, std::string(to_string(v)) + " needs a wider halo");
  }
  BandRecipe recipe;
  recipe.bc = ctx.bc;
  recipe.ghost = ghost;
  recipe.ghost_k = gk;
  recipe.pick = [o2, main, fallback_layers](int d) -> const InteriorStencil& {
    return d < fallback_layers ? o2 : main;
  };
  // Sommerfeld rows need the full stencil inside; Dirichlet rows must also
  // stay clear of the decoupled boundary nodes, one layer further in
  const int band = std::max(radius, fallback_layers) + (dir ? 1 : 0);
  RowFn rows = [gc, kc, recipe](int i, int j) { return band_row(gc, kc, recipe, i, j); };
  return std::make_shared<StencilOperator>(ctx.coarse_layout, main, kc.k2_field(ctx.coarse_layout),
                                           std::max(band, 1), rows);
}

}  // namespace

CoarseOperatorPtr make_coarse_operator(CoarseOpVariant v, const CoarseContext& ctx) {
  if (!ctx.coarse_layout) throw Error(ErrorKind::MissingFineContext, "no coarse layout");
  if (v == CoarseOpVariant::StrGlk || v == CoarseOpVariant::StclOpGlk) {
    if (!ctx.fine_op || !ctx.fine_layout) {
      throw Error(ErrorKind::MissingFineContext, std::string(to_string(v)) + " needs the fine operator");
    }
    if (v == CoarseOpVariant::StrGlk) return std::make_shared<StrGlkCoarse>(ctx);
    return std::make_shared<StclOpGlkCoarse>(ctx);
  }
  return std::make_shared<StencilCoarse>(v, build_red(v, ctx));
}

StencilOperatorPtr red_stencil_operator(const CoarseOperator& op) {
  if (auto* s = dynamic_cast<const StencilCoarse*>(&op)) return s->op();
  return nullptr;
}

}  // namespace helmdef
