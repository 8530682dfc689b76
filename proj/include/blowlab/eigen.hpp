// Principal Dirichlet eigenpair of the discrete Laplacian: inverse power
// iteration with a direct tridiagonal solve per step in 1D and
// Peaceman-Rachford alternating-direction solves (Wachspress parameter
// cycle) in 2D.

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "blowlab/grid.hpp"
#include "blowlab/tridiag.hpp"

namespace blowlab {

struct EigenPair {
  double lambda0 = 0.0;
  Field phi0_sup;    // max value exactly 1
  Field phi0_mass;   // discrete integral exactly 1
  double residual_norm = 0.0;  // ||D_h phi + lambda phi||_inf / lambda
};

struct EigenOptions {
  double tol = 1e-12;    // on eigenvalue increments
  int max_iter = 400;
  double adi_tol = 1e-13;  // inner ADI relative residual (2D)
  int adi_max_cycles = 60;
  int adi_params = 10;   // Wachspress parameters per cycle
};

namespace detail {

inline double rayleigh(const DomainGrid& g, const Field& x) {
  Field ax;
  apply_laplacian(g, x, ax);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num -= x[i] * ax[i];  // A = -Laplacian is SPD
    den += x[i] * x[i];
  }
  return num / den;
}

inline void normalize_sup(Field& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  for (double& v : x) v /= m;
}

/// One Peaceman-Rachford double sweep for (Ax + Ay) z = b with parameter rho.
/// Ax, Ay are the (positive) 1D second-difference operators along each axis.
class AdiSweeper {
 public:
  AdiSweeper(const DomainGrid& g) : g_(g), ihx2_(1.0 / (g.hx * g.hx)), ihy2_(1.0 / (g.hy * g.hy)) {}

  void sweep(Field& z, const Field& b, double rho) {
    const int nx = g_.nx, ny = g_.ny;
    Field rhs(z.size());
    // Half-step 1: (Ax + rho I) z* = b - (Ay - rho I) z, row tridiagonal solves.
    TridiagSolver row(nx, 2.0 * ihx2_ + rho, -ihx2_);
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        int k = g_.idx(ix, iy);
        double dn = iy > 0 ? z[k - nx] : 0.0;
        double up = iy + 1 < ny ? z[k + nx] : 0.0;
        double ay_z = (2.0 * z[k] - dn - up) * ihy2_;
        rhs[k] = b[k] - ay_z + rho * z[k];
      }
      row.solve(&rhs[g_.idx(0, iy)]);
    }
    // Half-step 2: (Ay + rho I) z' = b - (Ax - rho I) z*, column solves.
    TridiagSolver col(ny, 2.0 * ihy2_ + rho, -ihy2_);
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        int k = g_.idx(ix, iy);
        double l = ix > 0 ? rhs[k - 1] : 0.0;
        double r = ix + 1 < nx ? rhs[k + 1] : 0.0;
        double ax_z = (2.0 * rhs[k] - l - r) * ihx2_;
        z[k] = b[k] - ax_z + rho * rhs[k];
      }
    for (int ix = 0; ix < nx; ++ix) col.solve_strided(&z[g_.idx(ix, 0)], nx);
  }

 private:
  const DomainGrid& g_;
  double ihx2_, ihy2_;
};

/// Solve (-Laplacian) z = b to adi_tol by cycling Wachspress parameters.
inline void adi_solve(const DomainGrid& g, const Field& b, Field& z, const EigenOptions& opt) {
  const double pi = std::numbers::pi;
  auto axis_bounds = [](int n, double h, double len) {
    double amin = (2.0 - 2.0 * std::cos(pi * h / len)) / (h * h);
    double amax = (2.0 - 2.0 * std::cos(pi * n * h / len)) / (h * h);
    return std::pair{amin, amax};
  };
  auto [ax_min, ax_max] = axis_bounds(g.nx, g.hx, g.b - g.a);
  auto [ay_min, ay_max] = axis_bounds(g.ny, g.hy, g.d - g.c);
  double lo = std::min(ax_min, ay_min) * 0.9, hi = std::max(ax_max, ay_max) * 1.1;

  std::vector<double> rho(opt.adi_params);
  for (int m = 0; m < opt.adi_params; ++m)
    rho[m] = hi * std::pow(lo / hi, (m + 0.5) / opt.adi_params);

  AdiSweeper sweeper(g);
  double bnorm = sup_norm(b);
  Field r;
  for (int cycle = 0; cycle < opt.adi_max_cycles; ++cycle) {
    for (double p : rho) sweeper.sweep(z, b, p);
    apply_laplacian(g, z, r);
    double rnorm = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) rnorm = std::max(rnorm, std::abs(-r[i] - b[i]));
    if (rnorm <= opt.adi_tol * std::max(bnorm, 1e-300)) return;
  }
  throw std::runtime_error("adi_solve: inner iteration did not reach tolerance");
}

}  // namespace detail

inline EigenPair principal_eigenpair(const DomainGrid& g, const EigenOptions& opt = {}) {
  Field x(g.size(), 1.0);
  detail::normalize_sup(x);
  double lambda = detail::rayleigh(g, x), lambda_prev;
  TridiagSolver thomas;
  if (g.shape == ShapeKind::Interval)
    thomas.reset(g.nx, 2.0 / (g.hx * g.hx), -1.0 / (g.hx * g.hx));

  int it = 0;
  Field z = x;
  for (; it < opt.max_iter; ++it) {
    if (g.shape == ShapeKind::Interval) {
      thomas.solve(x.data());
    } else {
      detail::adi_solve(g, x, z, opt);
      x = z;
    }
    detail::normalize_sup(x);
    lambda_prev = lambda;
    lambda = detail::rayleigh(g, x);
    if (std::abs(lambda - lambda_prev) <= opt.tol * std::abs(lambda) && it >= 2) break;
  }

  // Residual against the discrete operator.
  Field ax;
  apply_laplacian(g, x, ax);
  double res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) res = std::max(res, std::abs(ax[i] + lambda * x[i]));
  res /= lambda;

  if (it >= opt.max_iter)
    throw std::runtime_error("principal_eigenpair: stagnation after " +
                             std::to_string(opt.max_iter) +
                             " iterations, residual = " + std::to_string(res));

  // Principal eigenfunction is signed-definite; orient positive.
  double mx = max_value(x);
  if (mx < 0) {
    for (double& v : x) v = -v;
    mx = max_value(x);
  }
  EigenPair ep;
  ep.lambda0 = lambda;
  ep.phi0_sup = x;
  for (double& v : ep.phi0_sup) v /= mx;
  ep.phi0_mass = ep.phi0_sup;
  double mass = discrete_integral(g, ep.phi0_mass);
  for (double& v : ep.phi0_mass) v /= mass;
  ep.residual_norm = res;
  return ep;
}

/// Exact principal eigenvalue of the discrete 1D operator on n interior
/// nodes over an interval of length len (used for axis splits in 2D gauges).
inline double discrete_axis_lambda0(int n, double h, double len) {
  return (2.0 - 2.0 * std::cos(std::numbers::pi * h / len)) / (h * h);
}

}  // namespace blowlab
