#include "helmdef/optimize9pt.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace helmdef {

MinMode find_min_mode(double k) {
  if (!(k > 0.0)) throw Error(ErrorKind::NonPositiveK, "find_min_mode needs k > 0");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const int n = static_cast<int>(std::ceil(k / std::numbers::pi)) + 2;
  MinMode best{1, 1, 2.0 * pi2 - k * k};
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      const double v = (i * i + j * j) * pi2 - k * k;
      if (std::abs(v) < std::abs(best.value)) best = {i, j, v};
    }
  return best;
}

double nine_point_eigenvalue(const NinePointCoeffs& c, double k, double H, int p, int q) {
  const double cp = std::cos(p * std::numbers::pi * H);
  const double cq = std::cos(q * std::numbers::pi * H);
  const double a = c.a0 + 2.0 * c.as * (cp + cq) + 4.0 * c.ac * cp * cq;
  const double b = c.b0 + 2.0 * c.bs * (cp + cq) + 4.0 * c.bc * cp * cq;
  return a / (H * H) - k * k * b;
}

NinePointCoeffs optimize_9pt_coefficients(double k, double h_ref, int p, int q, double target) {
  if (!(k > 0.0) || !(h_ref > 0.0))
    throw Error(ErrorKind::ConfigError, "optimize_9pt_coefficients needs k, h_ref > 0");
  const double H = 2.0 * h_ref;
  // 1 - cos(x) = 2 sin^2(x/2) keeps the alignment row free of cancellation;
  // it is the eigenvalue row minus the first constraint.
  const double sp = std::sin(p * std::numbers::pi * H / 2.0);
  const double sq = std::sin(q * std::numbers::pi * H / 2.0);
  const double dp = 2.0 * sp * sp;
  const double dq = 2.0 * sq * sq;
  Eigen::Matrix3d M;
  M << 1.0, 4.0, 4.0,
       0.0, 1.0, 2.0,
       0.0, -2.0 * (dp + dq), 4.0 * (dp * dq - dp - dq);
  Eigen::Vector3d r(0.0, -1.0, H * H * (target + k * k));
  // det = 4 dp dq
  if (std::abs(4.0 * dp * dq) <= 1e-14 * (1.0 + 8.0 * (dp + dq)))
    throw Error(ErrorKind::SingularSystem, "eigenvalue alignment is dependent on the constraints");
  const Eigen::Vector3d x = M.fullPivLu().solve(r);
  NinePointCoeffs c;
  c.a0 = x(0);
  c.as = x(1);
  c.ac = x(2);
  return c;
}

NinePointCoeffs round_9pt_coefficients(const NinePointCoeffs& c, int digits) {
  const double s = std::pow(10.0, digits);
  NinePointCoeffs r = c;
  r.ac = std::round(c.ac * s) / s;
  r.as = -1.0 - 2.0 * r.ac;
  r.a0 = -4.0 * r.as - 4.0 * r.ac;
  return r;
}

}  // namespace helmdef
