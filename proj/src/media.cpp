#include "helmdef/media.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace helmdef {

double WavenumberField::kmax() const { return *std::max_element(k.begin(), k.end()); }
double WavenumberField::kmin() const { return *std::min_element(k.begin(), k.end()); }

WavenumberField WavenumberField::coarsened() const {
  WavenumberField c;
  c.grid = coarsen_grid(grid);
  c.k.resize(c.grid.points());
  for (int j = 0; j < c.grid.ny; ++j)
    for (int i = 0; i < c.grid.nx; ++i)
      c.k[static_cast<std::size_t>(j) * c.grid.nx + i] = at(fine_index(i), fine_index(j));
  return c;
}

RealField WavenumberField::k2_field(const LayoutPtr& layout) const {
  RealField f(layout);
  f.from_function([&](int i, int j) { return at(i, j) * at(i, j); });
  return f;
}

WavenumberField constant_k(const Grid2D& grid, double k) {
  if (!(k > 0.0)) throw Error(ErrorKind::NonPositiveK, "k=" + std::to_string(k));
  return {grid, std::vector<double>(grid.points(), k)};
}

LayeredVelocityModel default_wedge() {
  // top layer 2000 m/s, slanted middle layer 1500 m/s, bottom 3000 m/s
  return {{2000.0, 1500.0, 3000.0}, {{-400.0, -200.0}, {-800.0, -700.0}}};
}

Extents wedge_extents() { return {0.0, -1000.0, 600.0, 0.0}; }

WavenumberField layered_k(const Grid2D& grid, const LayeredVelocityModel& model, double f) {
  if (model.velocities.empty() || model.interfaces.size() + 1 != model.velocities.size()) {
    throw Error(ErrorKind::UncoveredRegion, "layer/interface count mismatch");
  }
  for (double c : model.velocities) {
    if (!(c > 0.0)) throw Error(ErrorKind::NonPositiveVelocity, "layer velocity " + std::to_string(c));
  }
  const double x0 = grid.extents.x0;
  const double lx = grid.extents.x1 - grid.extents.x0;
  // interfaces must not cross inside the domain
  for (std::size_t m = 1; m < model.interfaces.size(); ++m) {
    const Interface& a = model.interfaces[m - 1];
    const Interface& b = model.interfaces[m];
    if (b.y_left > a.y_left || b.y_right > a.y_right) {
      throw Error(ErrorKind::UncoveredRegion, "interfaces out of order");
    }
  }
  WavenumberField out{grid, std::vector<double>(grid.points())};
  const double w = 2.0 * std::numbers::pi * f;
  for (int i = 0; i < grid.nx; ++i) {
    const double t = (grid.x(i) - x0) / lx;
    for (int j = 0; j < grid.ny; ++j) {
      const double y = grid.y(j);
      std::size_t layer = 0;
      // on an interface the upper layer wins, hence the strict comparison
      while (layer < model.interfaces.size()) {
        const Interface& s = model.interfaces[layer];
        const double yi = s.y_left + t * (s.y_right - s.y_left);
        if (y < yi - 1e-9 * std::max(1.0, std::abs(yi))) {
          ++layer;
        } else {
          break;
        }
      }
      out.k[static_cast<std::size_t>(j) * grid.nx + i] = w / model.velocities[layer];
    }
  }
  return out;
}

VelocityGrid read_velocity_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MalformedFile, "cannot open " + path);
  VelocityGrid v;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::MalformedFile, path + ": empty file");
  {
    std::istringstream hs(line);
    if (!(hs >> v.nx >> v.ny) || v.nx < 2 || v.ny < 2) {
      throw Error(ErrorKind::MalformedFile, path + ": bad header '" + line + "'");
    }
  }
  v.c.reserve(static_cast<std::size_t>(v.nx) * v.ny);
  for (int r = 0; r < v.ny; ++r) {
    if (!std::getline(in, line)) {
      throw Error(ErrorKind::MalformedFile, path + ": expected " + std::to_string(v.ny) + " rows");
    }
    std::istringstream ls(line);
    double c = 0.0;
    int n = 0;
    while (ls >> c) {
      v.c.push_back(c);
      ++n;
    }
    if (!ls.eof() || n != v.nx) {
      throw Error(ErrorKind::MalformedFile, path + ": row " + std::to_string(r + 2) + " has " +
                                                std::to_string(n) + " values");
    }
  }
  for (double c : v.c) {
    if (!(c > 0.0)) throw Error(ErrorKind::NonPositiveVelocity, path + ": velocity " + std::to_string(c));
  }
  return v;
}

WavenumberField velocity_to_k(const VelocityGrid& v, const Grid2D& grid, double f, bool resample) {
  if (!resample && (v.nx != grid.nx || v.ny != grid.ny)) {
    throw Error(ErrorKind::DimensionMismatch, "file " + std::to_string(v.nx) + "x" +
                                                  std::to_string(v.ny) + " vs grid " +
                                                  std::to_string(grid.nx) + "x" +
                                                  std::to_string(grid.ny));
  }
  const double w = 2.0 * std::numbers::pi * f;
  // file row r sits at grid row ny-1-r (row 0 is the top)
  auto vel = [&](int fi, int fr) { return v.c[static_cast<std::size_t>(fr) * v.nx + fi]; };
  WavenumberField out{grid, std::vector<double>(grid.points())};
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      double c = 0.0;
      if (v.nx == grid.nx && v.ny == grid.ny) {
        c = vel(i, grid.ny - 1 - j);
      } else {
        const double s = static_cast<double>(i) * (v.nx - 1) / (grid.nx - 1);
        const double t = static_cast<double>(grid.ny - 1 - j) * (v.ny - 1) / (grid.ny - 1);
        const int i0 = std::min(static_cast<int>(s), v.nx - 2);
        const int r0 = std::min(static_cast<int>(t), v.ny - 2);
        const double a = s - i0;
        const double b = t - r0;
        c = (1 - a) * (1 - b) * vel(i0, r0) + a * (1 - b) * vel(i0 + 1, r0) +
            (1 - a) * b * vel(i0, r0 + 1) + a * b * vel(i0 + 1, r0 + 1);
      }
      out.k[static_cast<std::size_t>(j) * grid.nx + i] = w / c;
    }
  }
  return out;
}

WavenumberField load_velocity_grid(const std::string& path, const Grid2D& grid, double f,
                                   bool resample) {
  return velocity_to_k(read_velocity_grid(path), grid, f, resample);
}

std::pair<int, int> nearest_point(const Grid2D& grid, double x, double y) {
  const Extents& e = grid.extents;
  const double tol = 1e-12 * std::max({1.0, std::abs(e.x1), std::abs(e.y0)});
  if (x < e.x0 - tol || x > e.x1 + tol || y < e.y0 - tol || y > e.y1 + tol) {
    throw Error(ErrorKind::LocationOutsideDomain,
                "(" + std::to_string(x) + ", " + std::to_string(y) + ")");
  }
  auto snap = [](double s, int n) {
    // round half down so ties go to the lower index
    const int lo = static_cast<int>(std::floor(s));
    const double frac = s - lo;
    const int idx = frac > 0.5 + 1e-12 ? lo + 1 : lo;
    return std::clamp(idx, 0, n - 1);
  };
  return {snap((x - e.x0) / grid.h, grid.nx), snap((y - e.y0) / grid.h, grid.ny)};
}

Field point_source_rhs(const LayoutPtr& layout, double x, double y) {
  const Grid2D& g = layout->grid();
  auto [i, j] = nearest_point(g, x, y);
  Field b(layout);
  b.set(i, j, 1.0 / (g.h * g.h));
  b.exchange_halos();
  return b;
}

}  // namespace helmdef
