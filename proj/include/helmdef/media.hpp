#pragma once

#include <string>
#include <vector>

#include "helmdef/field.hpp"
#include "helmdef/grid.hpp"

namespace helmdef {

/// Per-point wavenumber on a global grid (serial storage, i fastest).
struct WavenumberField {
  Grid2D grid;
  std::vector<double> k;

  double at(int i, int j) const { return k[static_cast<std::size_t>(j) * grid.nx + i]; }
  double kmax() const;
  double kmin() const;
  /// max(k) * h, the resolution indicator checked by the driver.
  double kh() const { return kmax() * grid.h; }
  /// k sampled at coincident points of the 2h grid.
  WavenumberField coarsened() const;
  /// Copy into a distributed real field holding k^2 (halos exchanged).
  RealField k2_field(const LayoutPtr& layout) const;
};

WavenumberField constant_k(const Grid2D& grid, double k);

/// One interface line between two layers, given by its depth (y value) at
/// the left and right ends of the domain; linear in between.
struct Interface {
  double y_left;
  double y_right;
};

/// Layers listed top to bottom: velocities[0] lies above interfaces[0], and
/// so on. interfaces.size() == velocities.size() - 1.
struct LayeredVelocityModel {
  std::vector<double> velocities;
  std::vector<Interface> interfaces;
};

/// Three-layer wedge on (0,600) x (-1000,0). The velocities and interface
/// depths are configuration defaults, not measured data.
LayeredVelocityModel default_wedge();
Extents wedge_extents();

WavenumberField layered_k(const Grid2D& grid, const LayeredVelocityModel& model, double f);

/// ASCII velocity grid: first line "nx ny", then ny rows of nx values with
/// the first row at the top of the domain.
struct VelocityGrid {
  int nx = 0;
  int ny = 0;
  std::vector<double> c;  // row-major, row 0 = top
};

VelocityGrid read_velocity_grid(const std::string& path);
WavenumberField velocity_to_k(const VelocityGrid& v, const Grid2D& grid, double f, bool resample);
WavenumberField load_velocity_grid(const std::string& path, const Grid2D& grid, double f,
                                   bool resample = false);

/// Index of the grid point nearest to (x, y); ties go to the lower index.
std::pair<int, int> nearest_point(const Grid2D& grid, double x, double y);

/// Discrete delta of unit mass: 1/h^2 at the nearest grid point.
Field point_source_rhs(const LayoutPtr& layout, double x, double y);

}  // namespace helmdef
