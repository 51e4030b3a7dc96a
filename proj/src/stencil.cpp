#include "helmdef/stencil.hpp"

#include <string>

namespace helmdef {

const IStencil& glk_laplacian_reference() {
  static const IStencil s = IStencil::from_rows({
      {-3, -44, -98, -44, -3},
      {-44, -112, 56, -112, -44},
      {-98, 56, 980, 56, -98},
      {-44, -112, 56, -112, -44},
      {-3, -44, -98, -44, -3},
  });
  return s;
}

const IStencil& glk_mass_reference() {
  static const IStencil s = IStencil::from_rows({
      {1, 28, 70, 28, 1},
      {28, 784, 1960, 784, 28},
      {70, 1960, 4900, 1960, 70},
      {28, 784, 1960, 784, 28},
      {1, 28, 70, 28, 1},
  });
  return s;
}

ComposedStencil derive_red_glk_stencils() {
  // 64 * high-order restriction and 64 * high-order prolongation
  const IStencil r = IStencil::outer({1, 4, 6, 4, 1}, {1, 4, 6, 4, 1});
  // 8 * (1/8)[1 4 6 4 1] is also the fine footprint of one coarse point
  const IStencil& p = r;
  const IStencil lap_h = IStencil::from_rows({{0, -1, 0}, {-1, 4, -1}, {0, -1, 0}});
  const IStencil id = IStencil::from_rows({{1}});

  // R A P = lap_c / (64 * 64 * h^2) = lap_c / (1024 (2h)^2); the reference
  // is over 256 (2h)^2, so lap_c must be exactly 4x the reference.
  IStencil lap = galerkin_compose(r, lap_h, p);
  IStencil mass = galerkin_compose(r, id, p);
  for (auto& v : lap.c) {
    if (v % 4 != 0) throw Error(ErrorKind::CompositionMismatch, "Laplacian numerator not divisible by 4");
    v /= 4;
  }
  if (!(lap == glk_laplacian_reference())) {
    throw Error(ErrorKind::CompositionMismatch, "Laplacian part differs from reference");
  }
  if (!(mass == glk_mass_reference())) {
    throw Error(ErrorKind::CompositionMismatch, "mass part differs from reference");
  }
  if (lap.sum() != 0) {
    throw Error(ErrorKind::CompositionMismatch, "Laplacian part sums to " + std::to_string(lap.sum()));
  }
  return {lap, mass};
}

}  // namespace helmdef
