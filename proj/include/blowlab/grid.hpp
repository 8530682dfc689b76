// Discretized Dirichlet domains: 1D intervals and 2D rectangles on uniform
// interior grids (boundary nodes are implicit zeros). Fields are vectors over
// interior nodes, row-major in 2D.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace blowlab {

enum class ShapeKind { Interval, Rectangle };

using Field = std::vector<double>;

struct DomainGrid {
  ShapeKind shape = ShapeKind::Interval;
  double a = 0.0, b = 1.0;  // x-bounds
  double c = 0.0, d = 1.0;  // y-bounds (rectangle only)
  int nx = 0, ny = 0;       // interior node counts per axis (ny = 0 in 1D)
  double hx = 0.0, hy = 0.0;

  int size() const { return shape == ShapeKind::Interval ? nx : nx * ny; }
  double x(int ix) const { return a + (ix + 1) * hx; }
  double y(int iy) const { return c + (iy + 1) * hy; }
  int idx(int ix, int iy) const { return iy * nx + ix; }
  double cell_measure() const { return shape == ShapeKind::Interval ? hx : hx * hy; }
};

inline DomainGrid make_interval(double a, double b, int resolution) {
  if (!(a < b)) throw std::invalid_argument("build_grid: degenerate bounds (need a < b)");
  if (resolution < 3) throw std::invalid_argument("build_grid: resolution must be >= 3");
  DomainGrid g;
  g.shape = ShapeKind::Interval;
  g.a = a;
  g.b = b;
  g.nx = resolution;
  g.hx = (b - a) / (resolution + 1);
  return g;
}

inline DomainGrid make_rectangle(double a, double b, double c, double d, int resolution_x,
                                 int resolution_y) {
  if (!(a < b) || !(c < d))
    throw std::invalid_argument("build_grid: degenerate bounds (need a < b and c < d)");
  if (resolution_x < 3 || resolution_y < 3)
    throw std::invalid_argument("build_grid: resolution must be >= 3 per axis");
  DomainGrid g;
  g.shape = ShapeKind::Rectangle;
  g.a = a;
  g.b = b;
  g.c = c;
  g.d = d;
  g.nx = resolution_x;
  g.ny = resolution_y;
  g.hx = (b - a) / (resolution_x + 1);
  g.hy = (d - c) / (resolution_y + 1);
  return g;
}

inline DomainGrid make_rectangle(double a, double b, double c, double d, int resolution) {
  return make_rectangle(a, b, c, d, resolution, resolution);
}

inline double sup_norm(const Field& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

inline double max_value(const Field& u) {
  double m = -1e308;
  for (double v : u) m = std::max(m, v);
  return m;
}

/// Discrete integral with the implicit Dirichlet boundary (composite rule
/// with zero boundary values reduces to h * sum over interior nodes).
inline double discrete_integral(const DomainGrid& g, const Field& u) {
  double s = 0.0;
  for (double v : u) s += v;
  return s * g.cell_measure();
}

/// Second-order central-difference Dirichlet Laplacian.
inline void apply_laplacian(const DomainGrid& g, const Field& u, Field& out) {
  out.assign(u.size(), 0.0);
  if (g.shape == ShapeKind::Interval) {
    double ih2 = 1.0 / (g.hx * g.hx);
    for (int i = 0; i < g.nx; ++i) {
      double left = i > 0 ? u[i - 1] : 0.0;
      double right = i + 1 < g.nx ? u[i + 1] : 0.0;
      out[i] = (left - 2.0 * u[i] + right) * ih2;
    }
    return;
  }
  double ihx2 = 1.0 / (g.hx * g.hx), ihy2 = 1.0 / (g.hy * g.hy);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      int k = g.idx(ix, iy);
      double l = ix > 0 ? u[k - 1] : 0.0;
      double r = ix + 1 < g.nx ? u[k + 1] : 0.0;
      double dn = iy > 0 ? u[k - g.nx] : 0.0;
      double up = iy + 1 < g.ny ? u[k + g.nx] : 0.0;
      out[k] = (l - 2.0 * u[k] + r) * ihx2 + (dn - 2.0 * u[k] + up) * ihy2;
    }
}

// -- initial data builders -------------------------------------------------

/// Piecewise-linear hat, height 1 at the domain center.
inline Field make_hat(const DomainGrid& g) {
  Field u(g.size());
  if (g.shape == ShapeKind::Interval) {
    for (int i = 0; i < g.nx; ++i) {
      double s = (g.x(i) - g.a) / (g.b - g.a);
      u[i] = 1.0 - 2.0 * std::abs(s - 0.5);
    }
    return u;
  }
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      double sx = (g.x(ix) - g.a) / (g.b - g.a);
      double sy = (g.y(iy) - g.c) / (g.d - g.c);
      u[g.idx(ix, iy)] = (1.0 - 2.0 * std::abs(sx - 0.5)) * (1.0 - 2.0 * std::abs(sy - 0.5));
    }
  return u;
}

/// Smooth asymmetric bump 27/4 s^2 (1-s) per axis (peak value 1 at s = 2/3).
inline Field make_asymmetric_bump(const DomainGrid& g) {
  auto bump = [](double s) { return 6.75 * s * s * (1.0 - s); };
  Field u(g.size());
  if (g.shape == ShapeKind::Interval) {
    for (int i = 0; i < g.nx; ++i) u[i] = bump((g.x(i) - g.a) / (g.b - g.a));
    return u;
  }
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      u[g.idx(ix, iy)] = bump((g.x(ix) - g.a) / (g.b - g.a)) *
                         bump((g.y(iy) - g.c) / (g.d - g.c));
  return u;
}

inline Field scaled(Field u, double amplitude) {
  for (double& v : u) v *= amplitude;
  return u;
}

}  // namespace blowlab
