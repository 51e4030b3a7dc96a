#include "helmdef/assembly.hpp"

#include <vector>

namespace helmdef {

namespace {
void check_cap(const Grid2D& g) {
  if (g.nx > kOracleCap || g.ny > kOracleCap) {
    throw Error(ErrorKind::GridTooLarge, std::to_string(g.nx) + "x" + std::to_string(g.ny));
  }
}
}  // namespace

SpMat assemble_matrix(const WavenumberField& kf, BcKind bc, Shift shift) {
  const Grid2D& g = kf.grid;
  check_cap(g);
  const int nx = g.nx;
  const int ny = g.ny;
  const double h = g.h;
  const double ih2 = 1.0 / (h * h);
  const cplx s = shift.value();
  auto id = [nx](int i, int j) { return j * nx + i; };
  std::vector<Eigen::Triplet<cplx>> tr;
  tr.reserve(static_cast<std::size_t>(5) * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int r = id(i, j);
      const double k = kf.at(i, j);
      const bool wb = i == 0, eb = i == nx - 1, sb = j == 0, nb = j == ny - 1;
      const int edges = int(wb) + int(eb) + int(sb) + int(nb);
      if (bc == BcKind::Dirichlet) {
        if (edges > 0) {
          tr.emplace_back(r, r, 1.0);
          continue;
        }
        tr.emplace_back(r, r, (4.0 - s * k * k * h * h) * ih2);
        if (i - 1 > 0) tr.emplace_back(r, id(i - 1, j), -ih2);
        if (i + 1 < nx - 1) tr.emplace_back(r, id(i + 1, j), -ih2);
        if (j - 1 > 0) tr.emplace_back(r, id(i, j - 1), -ih2);
        if (j + 1 < ny - 1) tr.emplace_back(r, id(i, j + 1), -ih2);
        continue;
      }
      // Sommerfeld: each missing neighbour folds onto the opposite one and
      // adds -2ikh to the centre
      const cplx centre = 4.0 - s * k * k * h * h - cplx(0.0, 2.0 * edges) * k * h;
      tr.emplace_back(r, r, centre * ih2);
      // on the west edge the west neighbour is missing and the east one doubles
      if (!wb) tr.emplace_back(r, id(i - 1, j), (eb ? -2.0 : -1.0) * ih2);
      if (!eb) tr.emplace_back(r, id(i + 1, j), (wb ? -2.0 : -1.0) * ih2);
      if (!sb) tr.emplace_back(r, id(i, j - 1), (nb ? -2.0 : -1.0) * ih2);
      if (!nb) tr.emplace_back(r, id(i, j + 1), (sb ? -2.0 : -1.0) * ih2);
    }
  }
  SpMat A(nx * ny, nx * ny);
  A.setFromTriplets(tr.begin(), tr.end());
  return A;
}

SpMat operator_matrix(const StencilOperator& op) {
  const Grid2D& g = op.grid();
  check_cap(g);
  std::vector<Eigen::Triplet<cplx>> tr;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      for (const Tap& t : op.row(i, j))
        tr.emplace_back(j * g.nx + i, (j + t.dj) * g.nx + (i + t.di), t.c);
  SpMat A(static_cast<Eigen::Index>(g.points()), static_cast<Eigen::Index>(g.points()));
  A.setFromTriplets(tr.begin(), tr.end());
  return A;
}

CVec to_vector(const Field& f) {
  std::vector<cplx> v = f.to_global();
  return Eigen::Map<CVec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void from_vector(const CVec& v, Field& f) {
  f.from_global(std::span<const cplx>(v.data(), static_cast<std::size_t>(v.size())));
}

}  // namespace helmdef
