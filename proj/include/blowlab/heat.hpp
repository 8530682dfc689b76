// Pure heat flow S(t)u0 under Dirichlet conditions: Crank-Nicolson stepping
// (Peaceman-Rachford ADI in 2D) with a short backward-Euler start, sup-norm
// decay traces, and the exponential envelope fit used by the criterion.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "blowlab/eigen.hpp"
#include "blowlab/grid.hpp"
#include "blowlab/scalar_function.hpp"
#include "blowlab/tridiag.hpp"

namespace blowlab {

struct DecayTrace {
  std::vector<double> times;
  std::vector<double> sup_norms;
  double c1 = 0.0, c2 = 0.0, t0 = 0.0;  // envelope constants (after fitting)
  double tail_rate = 0.0;               // fitted log-slope of the trace tail

  /// log ||S(t)u0||_inf: log-linear interpolation between samples and
  /// exponential continuation with the fitted tail rate beyond the last one.
  double log_norm_at(double t) const {
    if (t < 0) throw std::domain_error("decay trace: t must be nonnegative");
    if (times.empty()) throw std::domain_error("decay trace: empty");
    if (t >= times.back())
      return std::log(sup_norms.back()) + tail_rate * (t - times.back());
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t j = std::max<std::ptrdiff_t>(1, it - times.begin());
    double t0s = times[j - 1], t1s = times[j];
    double l0 = std::log(sup_norms[j - 1]), l1 = std::log(sup_norms[j]);
    double w = (t - t0s) / (t1s - t0s);
    return l0 + w * (l1 - l0);
  }

  double norm_at(double t) const { return std::exp(log_norm_at(t)); }
};

struct HeatOptions {
  double dt_factor = 1e-3;   // dt = dt_factor * (diffusion time scale)
  int rannacher_halves = 4;  // backward-Euler half-steps before CN
  double lambda_scale = 0.0; // diffusion rate; 0 -> analytic principal estimate
};

namespace detail {

inline double analytic_lambda_scale(const DomainGrid& g) {
  const double pi = std::numbers::pi;
  double lx = pi * pi / ((g.b - g.a) * (g.b - g.a));
  if (g.shape == ShapeKind::Interval) return lx;
  return lx + pi * pi / ((g.d - g.c) * (g.d - g.c));
}

/// One theta-step of u_t = Laplacian u: (I + theta dt A) u+ = (I - (1-theta) dt A) u,
/// where A = -Laplacian. 1D only; 2D handled by PR-ADI below.
class HeatStepper1D {
 public:
  HeatStepper1D(const DomainGrid& g, double dt, double theta) : g_(g), dt_(dt), theta_(theta) {
    double ih2 = 1.0 / (g.hx * g.hx);
    solver_.reset(g.nx, 1.0 + 2.0 * theta * dt * ih2, -theta * dt * ih2);
  }

  void step(Field& u) const {
    double ih2 = 1.0 / (g_.hx * g_.hx);
    double mu = (1.0 - theta_) * dt_ * ih2;
    Field rhs(u.size());
    for (int i = 0; i < g_.nx; ++i) {
      double l = i > 0 ? u[i - 1] : 0.0;
      double r = i + 1 < g_.nx ? u[i + 1] : 0.0;
      rhs[i] = u[i] + mu * (l - 2.0 * u[i] + r);
    }
    solver_.solve(rhs.data());
    u = std::move(rhs);
  }

 private:
  const DomainGrid& g_;
  double dt_, theta_;
  TridiagSolver solver_;
};

/// Peaceman-Rachford step for the 2D heat equation (second order, A-stable):
///   (I + dt/2 Ax) u* = (I - dt/2 Ay) u
///   (I + dt/2 Ay) u+ = (I - dt/2 Ax) u*
class HeatStepperPR {
 public:
  HeatStepperPR(const DomainGrid& g, double dt, double theta) : g_(g), dt_(dt), theta_(theta) {
    double ihx2 = 1.0 / (g.hx * g.hx), ihy2 = 1.0 / (g.hy * g.hy);
    rowx_.reset(g.nx, 1.0 + 2.0 * theta * dt * ihx2, -theta * dt * ihx2);
    coly_.reset(g.ny, 1.0 + 2.0 * theta * dt * ihy2, -theta * dt * ihy2);
  }

  void step(Field& u) const {
    const int nx = g_.nx, ny = g_.ny;
    double ihx2 = 1.0 / (g_.hx * g_.hx), ihy2 = 1.0 / (g_.hy * g_.hy);
    double muy = (1.0 - theta_) * dt_ * ihy2;
    double mux = (1.0 - theta_) * dt_ * ihx2;
    Field star(u.size());
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        int k = g_.idx(ix, iy);
        double dn = iy > 0 ? u[k - nx] : 0.0;
        double up = iy + 1 < ny ? u[k + nx] : 0.0;
        star[k] = u[k] - muy * (2.0 * u[k] - dn - up);
      }
      rowx_.solve(&star[g_.idx(0, iy)]);
    }
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        int k = g_.idx(ix, iy);
        double l = ix > 0 ? star[k - 1] : 0.0;
        double r = ix + 1 < nx ? star[k + 1] : 0.0;
        u[k] = star[k] - mux * (2.0 * star[k] - l - r);
      }
    for (int ix = 0; ix < nx; ++ix) coly_.solve_strided(&u[g_.idx(ix, 0)], nx);
  }

 private:
  const DomainGrid& g_;
  double dt_, theta_;
  TridiagSolver rowx_, coly_;
};

inline void check_initial_data(const Field& u0) {
  bool nontrivial = false;
  for (double v : u0) {
    if (v < 0) throw std::invalid_argument("initial data must be nonnegative");
    if (v > 0) nontrivial = true;
  }
  if (!nontrivial) throw std::invalid_argument("initial data must be nontrivial");
}

}  // namespace detail

/// Evolves the pure heat flow between the sample times and records the
/// sup-norm over interior nodes at each.
inline DecayTrace sup_norm_trace(const DomainGrid& g, const Field& u0,
                                 const std::vector<double>& times, HeatOptions opt = {}) {
  detail::check_initial_data(u0);
  if (times.empty() || times.front() != 0.0)
    throw std::invalid_argument("sup_norm_trace: schedule must start at t = 0");
  double lam = opt.lambda_scale > 0 ? opt.lambda_scale : detail::analytic_lambda_scale(g);
  double dt0 = opt.dt_factor / lam;

  DecayTrace tr;
  tr.times = times;
  tr.sup_norms.resize(times.size());
  Field u = u0;
  tr.sup_norms[0] = sup_norm(u);

  // Rannacher start: a few backward-Euler half-steps damp the non-smooth
  // components that Crank-Nicolson would keep oscillating.
  int ran = opt.rannacher_halves;
  if (g.shape == ShapeKind::Interval) {
    detail::HeatStepper1D be(g, dt0 / 2.0, 1.0);
    for (int i = 0; i < ran; ++i) be.step(u);
  } else {
    detail::HeatStepperPR be(g, dt0 / 2.0, 1.0);
    for (int i = 0; i < ran; ++i) be.step(u);
  }
  double t = ran * dt0 / 2.0;

  for (std::size_t j = 1; j < times.size(); ++j) {
    double target = times[j];
    if (target <= t + 1e-15 * std::max(1.0, target)) {
      tr.sup_norms[j] = sup_norm(u);
      continue;
    }
    long nsub = std::max<long>(1, std::lround(std::ceil((target - t) / dt0)));
    double dt = (target - t) / nsub;
    if (g.shape == ShapeKind::Interval) {
      detail::HeatStepper1D cn(g, dt, 0.5);
      for (long s = 0; s < nsub; ++s) cn.step(u);
    } else {
      detail::HeatStepperPR cn(g, dt, 0.5);
      for (long s = 0; s < nsub; ++s) cn.step(u);
    }
    t = target;
    tr.sup_norms[j] = sup_norm(u);
  }

  // Fitted tail rate over the last quarter of the samples (used for the
  // exponential continuation beyond the recorded horizon).
  std::size_t n = tr.times.size();
  std::size_t k0 = n - std::max<std::size_t>(2, n / 4);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double cnt = 0;
  for (std::size_t j = k0; j < n; ++j) {
    double xs = tr.times[j], ys = std::log(tr.sup_norms[j]);
    sx += xs;
    sy += ys;
    sxx += xs * xs;
    sxy += xs * ys;
    cnt += 1;
  }
  tr.tail_rate = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return tr;
}

struct EnvelopeFit {
  double c1 = 0.0, c2 = 0.0, t0 = 0.0;
};

/// c1 = min_{t >= t0} s(t) e^{l0 t}, c2 = max, with t0 = 1/l0 (higher modes
/// need time to wash out). Requires the trace to reach t0 + 3/l0.
inline EnvelopeFit envelope_constants(const DecayTrace& tr, double lambda0) {
  EnvelopeFit fit;
  fit.t0 = 1.0 / lambda0;
  if (tr.times.empty() || tr.times.back() < fit.t0 + 3.0 / lambda0)
    throw std::invalid_argument("envelope_constants: trace too short (need T >= t0 + 3/lambda0)");
  double lo = kInf, hi = 0.0;
  for (std::size_t j = 0; j < tr.times.size(); ++j) {
    if (tr.times[j] < fit.t0) continue;
    double e = tr.sup_norms[j] * std::exp(lambda0 * tr.times[j]);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  fit.c1 = lo;
  fit.c2 = hi;
  return fit;
}

/// Applies the fit to the trace record.
inline void apply_envelope(DecayTrace& tr, double lambda0) {
  EnvelopeFit f = envelope_constants(tr, lambda0);
  tr.c1 = f.c1;
  tr.c2 = f.c2;
  tr.t0 = f.t0;
}

/// Uniform schedule on [0, T] with n+1 samples.
inline std::vector<double> uniform_times(double T, int n) {
  std::vector<double> ts(n + 1);
  for (int i = 0; i <= n; ++i) ts[i] = T * i / n;
  return ts;
}

}  // namespace blowlab
