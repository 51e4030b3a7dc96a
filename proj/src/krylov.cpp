#include "helmdef/krylov.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace helmdef {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Givens rotation zeroing b in (a, b); c real, s complex.
void make_givens(cplx a, cplx b, double& c, cplx& s) {
  const double na = std::abs(a);
  const double nb = std::abs(b);
  if (nb == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (na == 0.0) {
    c = 0.0;
    s = std::conj(b) / nb;
    return;
  }
  const double r = std::hypot(na, nb);
  c = na / r;
  s = (a / na) * std::conj(b) / r;
}

void apply_or_copy(const ApplyFn& M, Field& in, Field& out) {
  if (M) {
    M(in, out);
  } else {
    copy(in, out);
  }
}

bool is_zero(const Field& x) {
  for (const cplx& v : x.cdata())
    if (v != 0.0) return false;
  return true;
}

// Orthogonalise w against V[0..n) with MGS, storing coefficients in h.
// One extra pass when cancellation was severe.
bool mgs(std::vector<Field>& V, int n, Field& w, std::vector<cplx>& h, double threshold) {
  const double before = norm2(w);
  // each pass subtracts V[i] and already takes the next coefficient
  h[0] = dot(V[0], w);
  for (int i = 0; i + 1 < n; ++i) h[i + 1] = axpy_dot(-h[i], V[i], w, V[i + 1]);
  axpy(-h[n - 1], V[n - 1], w);
  const double after = norm2(w);
  // orthogonality loss after one MGS pass is about eps * before / after
  const double eps = std::numeric_limits<double>::epsilon();
  if (after == 0.0 || eps * before <= threshold * after) return false;
  for (int i = 0; i < n; ++i) {
    const cplx c = dot(V[i], w);
    h[i] += c;
    axpy(-c, V[i], w);
  }
  return true;
}

}  // namespace

ConvergenceReport gmres(const ApplyFn& A, const ApplyFn& precond, Field& b, Field& x,
                        const KrylovOptions& opt) {
  const auto t0 = Clock::now();
  ConvergenceReport rep;
  const LayoutPtr& L = b.layout_ptr();
  const bool x_zero = is_zero(x);
  const int m_max = opt.restart > 0 ? opt.restart : std::max(opt.maxit, 1);

  Field t(L), r(L), w(L);
  // reference norm |M b|
  Field mb(L);
  apply_or_copy(precond, b, mb);
  const double ref = norm2(mb);
  const double bnorm = norm2(b);
  if (ref == 0.0 || bnorm == 0.0) {
    x.fill(0.0);
    rep.converged = true;
    rep.history = {0.0};
    rep.wall_time = seconds_since(t0);
    return rep;
  }
  const int limit = opt.fixed_iterations >= 0 ? opt.fixed_iterations : opt.maxit;

  std::vector<Field> V;
  std::vector<std::vector<cplx>> H;  // H[j] = column j, length j + 2
  std::vector<double> cs;
  std::vector<cplx> sn;
  std::vector<cplx> g;
  bool first_cycle = true;
  while (true) {
    // r = M (b - A x)
    if (first_cycle && x_zero) {
      copy(mb, r);
    } else {
      A(x, t);
      axpby(1.0, b, -1.0, t);
      apply_or_copy(precond, t, r);
    }
    double beta = norm2(r);
    if (first_cycle) rep.history.push_back(beta / ref);
    first_cycle = false;
    if ((opt.fixed_iterations < 0 && beta / ref <= opt.tol) || rep.iterations >= limit) {
      rep.converged = beta / ref <= opt.tol;
      break;
    }
    V.clear();
    H.clear();
    cs.clear();
    sn.clear();
    g.assign(1, beta);
    V.emplace_back(L);
    copy(r, V[0]);
    scale(1.0 / beta, V[0]);
    int j = 0;
    bool done = false;
    for (; j < m_max && rep.iterations < limit; ++j) {
      A(V[j], t);
      apply_or_copy(precond, t, w);
      std::vector<cplx> h(j + 2);
      if (mgs(V, j + 1, w, h, opt.reorth_threshold)) ++rep.reorthogonalisations;
      const double hn = norm2(w);
      h[j + 1] = hn;
      for (int i = 0; i < j; ++i) {
        const cplx a = h[i];
        const cplx bb = h[i + 1];
        h[i] = cs[i] * a + sn[i] * bb;
        h[i + 1] = -std::conj(sn[i]) * a + cs[i] * bb;
      }
      double c;
      cplx s;
      make_givens(h[j], h[j + 1], c, s);
      cs.push_back(c);
      sn.push_back(s);
      h[j] = c * h[j] + s * h[j + 1];
      h[j + 1] = 0.0;
      g.push_back(-std::conj(s) * g[j]);
      g[j] = c * g[j];
      H.push_back(std::move(h));
      ++rep.iterations;
      const double res = std::abs(g[j + 1]) / ref;
      rep.history.push_back(res);
      if (hn == 0.0) {
        rep.breakdown = true;
        ++j;
        done = true;
        break;
      }
      V.emplace_back(L);
      copy(w, V[j + 1]);
      scale(1.0 / hn, V[j + 1]);
      if (opt.fixed_iterations < 0 && res <= opt.tol) {
        ++j;
        done = true;
        break;
      }
    }
    // back substitution on the j x j triangle
    std::vector<cplx> y(j);
    for (int i = j - 1; i >= 0; --i) {
      cplx s = g[i];
      for (int k = i + 1; k < j; ++k) s -= H[k][i] * y[k];
      y[i] = s / H[i][i];
    }
    for (int i = 0; i < j; ++i) axpy(y[i], V[i], x);
    if (done || rep.iterations >= limit) {
      rep.converged = rep.history.back() <= opt.tol;
      break;
    }
  }
  V.clear();
  rep.final_relres_precond = rep.history.back();
  if (opt.verify_residual) {
    A(x, t);
    axpby(1.0, b, -1.0, t);
    rep.final_relres_true = norm2(t) / bnorm;
    apply_or_copy(precond, t, r);
    rep.final_relres_precond = norm2(r) / ref;
  }
  rep.wall_time = seconds_since(t0);
  return rep;
}

ConvergenceReport gcr(const ApplyFn& A, const ApplyFn& precond, Field& b, Field& x,
                      const KrylovOptions& opt) {
  const auto t0 = Clock::now();
  ConvergenceReport rep;
  const LayoutPtr& L = b.layout_ptr();
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    x.fill(0.0);
    rep.converged = true;
    rep.history = {0.0};
    rep.wall_time = seconds_since(t0);
    return rep;
  }
  Field r(L);
  if (is_zero(x)) {
    copy(b, r);
  } else {
    A(x, r);
    axpby(1.0, b, -1.0, r);
  }
  double res = norm2(r) / bnorm;
  rep.history.push_back(res);
  const int limit = opt.fixed_iterations >= 0 ? opt.fixed_iterations : opt.maxit;
  std::vector<Field> Z, Q;
  int stagnant = 0;
  while (rep.iterations < limit && (opt.fixed_iterations >= 0 || res > opt.tol)) {
    Field z(L), q(L);
    apply_or_copy(precond, r, z);
    A(z, q);
    for (std::size_t i = 0; i < Q.size(); ++i) {
      const cplx a = dot(Q[i], q);
      axpy(-a, Q[i], q);
      axpy(-a, Z[i], z);
    }
    const double qn = norm2(q);
    if (qn == 0.0) {
      rep.breakdown = true;
      break;
    }
    scale(1.0 / qn, q);
    scale(1.0 / qn, z);
    const cplx beta = dot(q, r);
    axpy(beta, z, x);
    axpy(-beta, q, r);
    ++rep.iterations;
    const double prev = res;
    res = norm2(r) / bnorm;
    rep.history.push_back(res);
    stagnant = (prev - res) <= 1e-12 * prev ? stagnant + 1 : 0;
    if (stagnant == 5) rep.warnings.push_back("StagnationWarning at iteration " + std::to_string(rep.iterations));
    Q.push_back(std::move(q));
    Z.push_back(std::move(z));
    if (opt.truncation > 0 && static_cast<int>(Q.size()) > opt.truncation) {
      Q.erase(Q.begin());
      Z.erase(Z.begin());
    }
  }
  rep.converged = res <= opt.tol;
  rep.final_relres_true = res;
  if (opt.verify_residual) {
    A(x, r);
    axpby(1.0, b, -1.0, r);
    rep.final_relres_true = norm2(r) / bnorm;
  }
  rep.final_relres_precond = rep.final_relres_true;
  rep.wall_time = seconds_since(t0);
  return rep;
}

ConvergenceReport fgmres(const ApplyFn& A, const ApplyFn& precond, Field& b, Field& x,
                         const KrylovOptions& opt) {
  const auto t0 = Clock::now();
  ConvergenceReport rep;
  const LayoutPtr& L = b.layout_ptr();
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    x.fill(0.0);
    rep.converged = true;
    rep.history = {0.0};
    rep.wall_time = seconds_since(t0);
    return rep;
  }
  const int limit = opt.fixed_iterations >= 0 ? opt.fixed_iterations : opt.maxit;
  const int m_max = opt.restart > 0 ? opt.restart : std::max(opt.maxit, 1);
  Field r(L), w(L);
  bool first = true;
  while (true) {
    if (first && is_zero(x)) {
      copy(b, r);
    } else {
      A(x, r);
      axpby(1.0, b, -1.0, r);
    }
    const double beta = norm2(r);
    if (first) rep.history.push_back(beta / bnorm);
    first = false;
    if ((opt.fixed_iterations < 0 && beta / bnorm <= opt.tol) || rep.iterations >= limit) break;
    std::vector<Field> V, Z;
    std::vector<std::vector<cplx>> H;
    std::vector<double> cs;
    std::vector<cplx> sn;
    std::vector<cplx> g{beta};
    V.emplace_back(L);
    copy(r, V[0]);
    scale(1.0 / beta, V[0]);
    int j = 0;
    bool done = false;
    for (; j < m_max && rep.iterations < limit; ++j) {
      Z.emplace_back(L);
      apply_or_copy(precond, V[j], Z[j]);
      A(Z[j], w);
      std::vector<cplx> h(j + 2);
      if (mgs(V, j + 1, w, h, opt.reorth_threshold)) ++rep.reorthogonalisations;
      const double hn = norm2(w);
      h[j + 1] = hn;
      for (int i = 0; i < j; ++i) {
        const cplx a = h[i];
        const cplx bb = h[i + 1];
        h[i] = cs[i] * a + sn[i] * bb;
        h[i + 1] = -std::conj(sn[i]) * a + cs[i] * bb;
      }
      double c;
      cplx s;
      make_givens(h[j], h[j + 1], c, s);
      cs.push_back(c);
      sn.push_back(s);
      h[j] = c * h[j] + s * h[j + 1];
      h[j + 1] = 0.0;
      g.push_back(-std::conj(s) * g[j]);
      g[j] = c * g[j];
      H.push_back(std::move(h));
      ++rep.iterations;
      const double res = std::abs(g[j + 1]) / bnorm;
      rep.history.push_back(res);
      if (hn == 0.0) {
        rep.breakdown = true;
        ++j;
        done = true;
        break;
      }
      V.emplace_back(L);
      copy(w, V[j + 1]);
      scale(1.0 / hn, V[j + 1]);
      if (opt.fixed_iterations < 0 && res <= opt.tol) {
        ++j;
        done = true;
        break;
      }
    }
    std::vector<cplx> y(j);
    for (int i = j - 1; i >= 0; --i) {
      cplx s = g[i];
      for (int k = i + 1; k < j; ++k) s -= H[k][i] * y[k];
      y[i] = s / H[i][i];
    }
    for (int i = 0; i < j; ++i) axpy(y[i], Z[i], x);
    if (done || rep.iterations >= limit) break;
  }
  rep.converged = rep.history.back() <= opt.tol;
  rep.final_relres_true = rep.history.back();
  if (opt.verify_residual) {
    A(x, r);
    axpby(1.0, b, -1.0, r);
    rep.final_relres_true = norm2(r) / bnorm;
  }
  rep.final_relres_precond = rep.final_relres_true;
  rep.wall_time = seconds_since(t0);
  return rep;
}

OuterSolver parse_outer_solver(const std::string& s) {
  if (s == "gmres") return OuterSolver::Gmres;
  if (s == "gcr") return OuterSolver::Gcr;
  if (s == "fgmres") return OuterSolver::Fgmres;
  throw Error(ErrorKind::ConfigError, "unknown outer solver '" + s + "'");
}

const char* to_string(OuterSolver s) {
  switch (s) {
    case OuterSolver::Gmres: return "gmres";
    case OuterSolver::Gcr: return "gcr";
    case OuterSolver::Fgmres: return "fgmres";
  }
  return "?";
}

ConvergenceReport krylov_solve(OuterSolver s, const ApplyFn& A, const ApplyFn& precond, Field& b,
                               Field& x, const KrylovOptions& opt) {
  switch (s) {
    case OuterSolver::Gmres: return gmres(A, precond, b, x, opt);
    case OuterSolver::Gcr: return gcr(A, precond, b, x, opt);
    case OuterSolver::Fgmres: return fgmres(A, precond, b, x, opt);
  }
  return {};
}

}  // namespace helmdef
