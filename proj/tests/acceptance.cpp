// Acceptance checks. Usage: acceptance [criterion...]; no argument runs all.
// Exit status is non-zero when any requested criterion fails.

#include <omp.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "helmdef/assembly.hpp"
#include "helmdef/coarse.hpp"
#include "helmdef/deflation.hpp"
#include "helmdef/experiment.hpp"
#include "helmdef/optimize9pt.hpp"
#include "oracle.hpp"

using namespace helmdef;

namespace {

bool g_ok = true;

void check(bool cond, const char* fmt, auto... args) {
  std::printf(cond ? "  ok    " : "  FAIL  ");
  if constexpr (sizeof...(args) == 0) std::fputs(fmt, stdout);
  else std::printf(fmt, args...);
  std::printf("\n");
  g_ok = g_ok && cond;
}

ExperimentResult run(const std::string& text) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult r = run_experiment(parse_config(text));
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string line = text;
  std::replace(line.begin(), line.end(), '\n', ' ');
  std::printf("  run   %-70s iters=%d avg_coarse=%.1f  (%.1f s)\n", line.c_str(), r.report.iterations,
              r.avg_coarse_iters, dt);
  for (std::size_t i = 0; i < r.report.history.size(); ++i)
    if (!std::isfinite(r.report.history[i])) std::printf("  warn  non-finite history entry %zu\n", i);
  return r;
}

bool within(int v, int target, int tol) { return std::abs(v - target) <= tol; }
bool within_pct(int v, int target, double pct) { return std::abs(v - target) <= pct * target + 1e-9; }

// 1 -------------------------------------------------------------------------
void c1() {
  std::vector<std::tuple<int, BcKind, double>> combos;
  for (int n : {5, 9, 17})
    for (BcKind bc : {BcKind::Dirichlet, BcKind::Sommerfeld})
      for (double k : {0.0, 20.0, 40.0}) combos.emplace_back(n, bc, k);
  const std::pair<int, int> parts[] = {{1, 1}, {2, 2}, {2, 1}, {1, 3}};
  double worst = 0.0;
  int probes = 0;
  for (int p = 0; p < 200; ++p) {
    const auto [n, bc, k] = combos[p % combos.size()];
    const auto [px, py] = parts[(p / combos.size()) % 4];
    auto L = oracle::square(n, px, py);
    WavenumberField kf = constant_k(L->grid(), 1.0);
    for (double& v : kf.k) v = k;
    for (Shift s : {Shift{1.0, 0.0}, Shift{1.0, -0.5}, Shift{1.0, 0.5}}) {
      auto op = make_shifted_laplacian(L, kf, bc, s);
      const oracle::Mat A = oracle::dense(assemble_matrix(kf, bc, s));
      Field x = oracle::random_field(L, 1000 + p), y(L);
      op->apply(x, y);
      worst = std::max(worst, oracle::rel_err(oracle::vec(y), A * oracle::vec(x)));
      ++probes;
    }
  }
  check(worst <= 1e-12, "%d probes (Helmholtz and CSLP), worst relative difference %.2e", probes, worst);
}

// 2 -------------------------------------------------------------------------
void c2() {
  const int n = 18;
  const Grid2D g = build_grid(n, n, {});
  const double h = g.h;
  for (double k : {0.0, 20.0, 40.0}) {
    WavenumberField kf = constant_k(g, 1.0);
    for (double& v : kf.k) v = k;
    const oracle::Mat A = oracle::dense(assemble_matrix(kf, BcKind::Dirichlet));
    // interior unknowns only
    std::vector<int> idx;
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i) idx.push_back(j * n + i);
    oracle::RMat Ai(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) Ai(a, b) = A(idx[a], idx[b]).real();
    Eigen::SelfAdjointEigenSolver<oracle::RMat> es(Ai);
    std::vector<double> got(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::vector<double> want;
    for (int i = 1; i < n - 1; ++i)
      for (int j = 1; j < n - 1; ++j)
        want.push_back((4 - 2 * std::cos(i * std::numbers::pi * h) - 2 * std::cos(j * std::numbers::pi * h) -
                        k * k * h * h) / (h * h));
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    double worst = 0.0, scale = 0.0;
    for (double w : want) scale = std::max(scale, std::abs(w));
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]) / scale);
    check(got.size() == 256 && worst <= 1e-9, "k=%g: 256 eigenvalues, worst relative difference %.2e", k, worst);
  }
}

// 3 -------------------------------------------------------------------------
void c3() {
  const int n = 9, nc = 5;
  auto L = oracle::square(n);
  const WavenumberField k = constant_k(L->grid(), 20.0);
  DeflationConfig dc;
  dc.variant = DeflationVariant::ADEF1;
  dc.coarse_op = CoarseOpVariant::StrGlk;
  dc.coarse_mode = CoarseSolveMode::Direct;
  Deflation d(L, k, BcKind::Dirichlet, dc);

  const oracle::Mat A = oracle::dense(assemble_matrix(k, BcKind::Dirichlet));
  const oracle::Mat Z = oracle::prolongation(TransferOrder::Low, BcKind::Dirichlet, n, n).cast<cplx>();
  auto proj = [&](const oracle::Vec& v) {
    Field in = oracle::field(L, v), out(L);
    d.apply_P_shifted(in, out, 0.0);
    return oracle::vec(out);
  };
  double e_pp = 0.0, e_paz = 0.0;
  for (int s = 0; s < 5; ++s) {
    const oracle::Vec x = oracle::random_vector(n * n, 40 + s);
    const oracle::Vec px = proj(x);
    e_pp = std::max(e_pp, oracle::rel_err(proj(px), px));
  }
  for (int c = 0; c < nc * nc; ++c) {
    const oracle::Vec az = A * Z.col(c);
    e_paz = std::max(e_paz, proj(az).norm() / az.norm());
  }
  check(e_pp <= 1e-9, "|P^2 x - P x| / |P x| = %.2e", e_pp);
  check(e_paz <= 1e-9, "max_j |P A z_j| / |A z_j| = %.2e", e_paz);

  // Dirichlet rows decouple the boundary; Z^T is the restriction on the
  // interior unknowns, where Q must equal Z E^-1 Z^T with E = Z^T A Z.
  std::vector<int> fi, ci;
  for (int j = 1; j < n - 1; ++j)
    for (int i = 1; i < n - 1; ++i) fi.push_back(j * n + i);
  for (int j = 1; j < nc - 1; ++j)
    for (int i = 1; i < nc - 1; ++i) ci.push_back(j * nc + i);
  oracle::Mat Zi(fi.size(), ci.size()), Ai(fi.size(), fi.size());
  for (std::size_t a = 0; a < fi.size(); ++a) {
    for (std::size_t b = 0; b < ci.size(); ++b) Zi(a, b) = Z(fi[a], ci[b]);
    for (std::size_t b = 0; b < fi.size(); ++b) Ai(a, b) = A(fi[a], fi[b]);
  }
  const oracle::Mat E = Zi.transpose() * Ai * Zi;
  const oracle::Mat Qi = Zi * E.partialPivLu().solve(Zi.transpose());
  double e_q = 0.0;
  for (int s = 0; s < 5; ++s) {
    oracle::Vec x = oracle::Vec::Zero(n * n);
    const oracle::Vec xi = oracle::random_vector(static_cast<Eigen::Index>(fi.size()), 60 + s);
    for (std::size_t a = 0; a < fi.size(); ++a) x[fi[a]] = xi[a];
    Field in = oracle::field(L, x), out(L);
    d.apply_Q(in, out);
    const oracle::Vec q = oracle::vec(out);
    oracle::Vec qi(fi.size());
    for (std::size_t a = 0; a < fi.size(); ++a) qi[a] = q[fi[a]];
    e_q = std::max(e_q, oracle::rel_err(qi, Qi * xi));
  }
  check(e_q <= 1e-10, "Q vs Z E^-1 Z^T on interior unknowns: %.2e", e_q);
}

// 4 -------------------------------------------------------------------------
void c4() {
  try {
    const ComposedStencil s = derive_red_glk_stencils();
    check(s.lap == glk_laplacian_reference(), "Laplacian part equals the reference table");
    check(s.mass == glk_mass_reference(), "mass part equals the reference table");
    check(s.lap.sum() == 0, "Laplacian part sums to %lld", static_cast<long long>(s.lap.sum()));
  } catch (const Error& e) {
    check(false, "%s", e.what());
  }
}

// 5 -------------------------------------------------------------------------
void c5() {
  const MinMode m = find_min_mode(80.0);
  check(m.i == 18 && m.j == 18, "min mode i=%d j=%d", m.i, m.j);
  check(std::abs(m.value + 4.496) <= 1e-3, "(i^2+j^2) pi^2 - k^2 = %.4f", m.value);
  const NinePointCoeffs c = round_9pt_coefficients(optimize_9pt_coefficients(80.0, 1e-4, m.i, m.j), 3);
  auto r3 = [](double v) { return std::round(v * 1000.0) / 1000.0; };
  check(r3(c.a0) == 4.632 && r3(c.as) == -1.316 && r3(c.ac) == 0.158, "a0=%.3f as=%.3f ac=%.3f", c.a0, c.as,
        c.ac);
}

// 6 -------------------------------------------------------------------------
void c6() {
  const int ks[] = {20, 40, 80};
  const int strglk[] = {8, 16, 42}, o2[] = {21, 40, 97}, tlkm[] = {9, 20, 70};
  for (int i = 0; i < 3; ++i) {
    const std::string base = "problem=mp2a\nkh=0.625\ncoarse_mode=direct\nk=" + std::to_string(ks[i]);
    const int a = run(base + "\ndeflation=adef1\ncoarse_op=str-glk").report.iterations;
    check(within(a, strglk[i], 2), "A-DEF1 str-Glk k=%d: %d (target %d +- 2)", ks[i], a, strglk[i]);
    const int b = run(base + "\ndeflation=adef1\ncoarse_op=red-o2").report.iterations;
    check(within_pct(b, o2[i], 0.1), "A-DEF1 ReD-O2 k=%d: %d (target %d +- 10%%)", ks[i], b, o2[i]);
    // TLKM solves its composite coarse system with plain GMRES, converged tightly
    const int c = run("problem=mp2a\nkh=0.625\ndeflation=tlkm\ncoarse_op=red-o2\ncoarse_mode=plain\n"
                      "coarse_tol=1e-12\ncoarse_maxit=5000\nk=" + std::to_string(ks[i]))
                      .report.iterations;
    check(within_pct(c, tlkm[i], 0.1), "TLKM ReD-O2 k=%d: %d (target %d +- 10%%)", ks[i], c, tlkm[i]);
  }
}

// 7 -------------------------------------------------------------------------
void c7() {
  const int ks[] = {20, 40, 80};
  const int strglk[] = {9, 13, 22}, o2[] = {20, 26, 41};
  for (int i = 0; i < 3; ++i) {
    const std::string base =
        "problem=mp2b\nkh=0.625\ncoarse_mode=direct\nbeta2=0.5\ndeflation=adef1\nk=" + std::to_string(ks[i]);
    const int a = run(base + "\ncoarse_op=str-glk").report.iterations;
    check(within(a, strglk[i], 2), "A-DEF1 str-Glk k=%d: %d (target %d +- 2)", ks[i], a, strglk[i]);
    const int b = run(base + "\ncoarse_op=red-o2").report.iterations;
    check(within_pct(b, o2[i], 0.1), "A-DEF1 ReD-O2 k=%d: %d (target %d +- 10%%)", ks[i], b, o2[i]);
  }
}

// 8 -------------------------------------------------------------------------
void c8() {
  std::vector<int> o2;
  for (int k : {40, 80, 160}) {
    const std::string base =
        "problem=mp2b\nkh=0.625\ncoarse_mode=direct\nbeta2=0.5\ndeflation=apd\nk=" + std::to_string(k);
    const int a = run(base + "\ncoarse_op=str-glk").report.iterations;
    check(within(a, 7, 1), "APD str-Glk k=%d: %d (target 7 +- 1)", k, a);
    const int b = run(base + "\ncoarse_op=red-glk2").report.iterations;
    check(within(b, 9, 1), "APD ReD-Glk2 k=%d: %d (target 9 +- 1)", k, b);
    o2.push_back(run(base + "\ncoarse_op=red-o2").report.iterations);
  }
  check(o2[0] < o2[1] && o2[1] < o2[2], "APD ReD-O2 strictly increasing: %d, %d, %d", o2[0], o2[1], o2[2]);
}

// 9 -------------------------------------------------------------------------
void c9() {
  const std::string base =
      "problem=mp2b\nk=80\nnx=257\nbeta2=0.5\ndeflation=apd\ncoarse_op=red-glk2\ncoarse_mode=cslp\ncoarse_maxit=5000";
  std::vector<int> its;
  for (const char* tol : {"1e-2", "1e-4", "1e-6", "1e-8", "1e-10", "1e-12"})
    its.push_back(run(base + "\ncoarse_tol=" + tol).report.iterations);
  bool same = true;
  for (int v : its) same = same && v == its.front();
  check(same, "GMRES iterations over six coarse tolerances: %d %d %d %d %d %d", its[0], its[1], its[2], its[3],
        its[4], its[5]);
  const ExperimentResult g = run(base + "\nouter_solver=gcr\ncoarse_tol=1e-1");
  check(g.report.converged && g.report.final_relres_true <= 1e-6,
        "GCR at coarse tolerance 1e-1: %d iterations, true relative residual %.2e", g.report.iterations,
        g.report.final_relres_true);
}

// 10 ------------------------------------------------------------------------
void c10() {
  const double pi = std::numbers::pi;
  auto u = [&](double x, double y) { return std::sin(pi * x) * std::sin(2 * pi * y); };
  auto err = [&](InteriorStencil (*make)(double), double H) {
    const InteriorStencil s = make(H);
    double e = 0.0;
    // a fixed set of interior sample points, common to every H
    for (double y = 0.25; y <= 0.75; y += 0.0625)
      for (double x = 0.25; x <= 0.75; x += 0.0625) {
        double v = 0.0;
        for (const RTap& t : s.lap) v += t.c * u(x + t.di * H, y + t.dj * H);
        e = std::max(e, std::abs(v - 5 * pi * pi * u(x, y)));
      }
    return e;
  };
  auto slope = [&](InteriorStencil (*make)(double), const char* name) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::printf("  %-8s", name);
    for (int m = 0; m < 4; ++m) {
      const double H = 1.0 / (16 << m);
      const double e = err(make, H);
      std::printf(" H=1/%-4d err=%.3e", 16 << m, e);
      const double lx = std::log2(H), ly = std::log2(e);
      sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    std::printf("\n");
    return (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  };
  const double s4 = slope(red_o4, "ReD-O4");
  const double sg = slope(red_glk, "ReD-Glk");
  check(std::abs(s4 - 4.0) <= 0.2, "ReD-O4 Laplacian slope %.3f (target 4 +- 0.2)", s4);
  check(std::abs(sg - 2.0) <= 0.2, "ReD-Glk Laplacian slope %.3f (target 2 +- 0.2)", sg);
}

// 11 ------------------------------------------------------------------------
void c11() {
  const std::int64_t M = 1000003, N = 4 * M;
  const std::map<CoarseOpVariant, std::int64_t> want = {
      {CoarseOpVariant::StrGlk, 50 * M + 10 * N + 18 * N},
      {CoarseOpVariant::StclOpGlk, (50 + 1740) * M},
      {CoarseOpVariant::ReD_O2, 10 * M},
      {CoarseOpVariant::ReD_O4, 18 * M},
      {CoarseOpVariant::ReD_O6, 26 * M},
      {CoarseOpVariant::ReD_cmpO4, 18 * M},
      {CoarseOpVariant::ReD_9ptO2, 18 * M},
      {CoarseOpVariant::ReD_Glk1, 50 * M},
      {CoarseOpVariant::ReD_Glk2, 50 * M},
  };
  for (const auto& [v, f] : want)
    check(flops_estimate(v, M, N) == f, "%-12s %lld", to_string(v), static_cast<long long>(flops_estimate(v, M, N)));
  const std::int64_t s = flops_estimate(CoarseOpVariant::StrGlk, 1'000'000, 4'000'000);
  check(s == 162'000'000, "str-Glk at M=1e6, N=4M: %lld", static_cast<long long>(s));
}

// 12 ------------------------------------------------------------------------
void c12() {
  // a fixed V-cycle depth keeps the preconditioner independent of the
  // partition; coarse systems are solved exactly
  const std::string base =
      "problem=mp2b\nk=40\nnx=129\nbeta2=0.5\ndeflation=apd\ncoarse_op=red-glk2\ncoarse_mode=direct\nmg_levels=5";
  const ExperimentResult ref = run(base);
  for (const char* p : {"px=2\npy=2", "px=2\npy=3"}) {
    const ExperimentResult r = run(base + "\n" + p);
    double worst = 0.0;
    const bool same = r.report.iterations == ref.report.iterations &&
                      r.report.history.size() == ref.report.history.size();
    if (same)
      for (std::size_t i = 0; i < r.report.history.size(); ++i)
        worst = std::max(worst, std::abs(r.report.history[i] - ref.report.history[i]) / ref.report.history[i]);
    std::string part(p);
    std::replace(part.begin(), part.end(), '\n', ' ');
    check(same && worst <= 1e-10, "%s: %d iterations (1x1: %d), history difference %.2e", part.c_str(),
          r.report.iterations, ref.report.iterations, worst);
  }
  const auto recs = scaling_harness(
      parse_config("problem=mp2b\nk=160\nnx=513\nbeta2=0.5\ndeflation=apd\ncoarse_op=red-glk2\ncoarse_mode=direct"),
      {1, 4}, ScalingMode::Strong);
  for (const auto& r : recs)
    std::printf("  scal  workers=%d %dx%d wall=%.2f s speedup=%.2f iters=%d\n", r.workers, r.px, r.py, r.wall_time,
                r.speedup, r.outer_iters);
  check(recs[1].outer_iters == recs[0].outer_iters, "outer iterations independent of worker count");
  check(recs[1].speedup >= 2.0, "speedup at 4 workers %.2f (target >= 2.0; host reports %d core(s))",
        recs[1].speedup, omp_get_num_procs());
}

// 13 ------------------------------------------------------------------------
void c13() {
  const int ks[] = {40, 80, 100};
  const int p9[] = {15, 20, 27}, o4[] = {14, 19, 22}, o2[] = {17, 28, 37};
  for (int i = 0; i < 3; ++i) {
    const std::string base =
        "problem=mp2a\nkh=0.3125\ncoarse_mode=direct\ndeflation=apd\nk=" + std::to_string(ks[i]);
    const int a = run(base + "\ncoarse_op=red-9pto2").report.iterations;
    check(within(a, p9[i], 2), "ReD-9ptO2 k=%d: %d (target %d +- 2)", ks[i], a, p9[i]);
    const int b = run(base + "\ncoarse_op=red-o4").report.iterations;
    check(within(b, o4[i], 2), "ReD-O4 k=%d: %d (target %d +- 2)", ks[i], b, o4[i]);
    const int c = run(base + "\ncoarse_op=red-o2").report.iterations;
    check(within_pct(c, o2[i], 0.1), "ReD-O2 k=%d: %d (target %d +- 10%%)", ks[i], c, o2[i]);
  }
}

// 14 ------------------------------------------------------------------------
void c14() {
  for (int f : {10, 20}) {
    const ExperimentResult r = run("problem=wedge\nkh=0.349\nbeta2=0.5\ndeflation=apd\ncoarse_op=str-glk\n"
                                   "coarse_mode=direct\nf=" + std::to_string(f));
    // 0.349 is the tabulated kh of these grids rounded to three digits
    const int nx = f == 10 ? 73 : 145, ny = f == 10 ? 121 : 241;
    check(r.grid.nx == nx && r.grid.ny == ny && r.kh <= 0.34907 + 1e-9, "f=%d: grid %dx%d, kh=%.5f", f, r.grid.nx,
          r.grid.ny, r.kh);
    check(r.report.iterations >= 5 && r.report.iterations <= 10, "f=%d: %d iterations (target [5, 10])", f,
          r.report.iterations);
  }
}

const std::map<int, std::pair<const char*, std::function<void()>>> kCriteria = {
    {1, {"operator oracle equivalence", c1}},
    {2, {"Dirichlet spectrum", c2}},
    {3, {"projector identities", c3}},
    {4, {"Galerkin-derived stencils", c4}},
    {5, {"nine-point coefficients", c5}},
    {6, {"MP-2a iteration counts", c6}},
    {7, {"MP-2b iteration counts", c7}},
    {8, {"wavenumber independence", c8}},
    {9, {"coarse tolerance invariance", c9}},
    {10, {"Taylor order", c10}},
    {11, {"FLOP model", c11}},
    {12, {"partition invariance and scaling", c12}},
    {13, {"Dirichlet point source counts", c13}},
    {14, {"wedge", c14}},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (const auto& [n, c] : kCriteria) which.push_back(n);
  bool all = true;
  for (int n : which) {
    auto it = kCriteria.find(n);
    if (it == kCriteria.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", n);
      return 2;
    }
    std::printf("criterion %d: %s\n", n, it->second.first);
    std::fflush(stdout);
    g_ok = true;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      it->second.second();
    } catch (const std::exception& e) {
      check(false, "exception: %s", e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s (%.1f s)\n\n", n, g_ok ? "PASS" : "FAIL", dt);
    std::fflush(stdout);
    all = all && g_ok;
  }
  return all ? 0 : 1;
}
