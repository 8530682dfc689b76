// Adaptive Gauss-Kronrod quadrature on dyadic windows, with an improper
// integral classifier and a log-scaled variant for integrands whose values
// overflow double (e.g. int_0^T psi with psi ~ e^{kt}).

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "blowlab/scalar_function.hpp"
#include "blowlab/verdict.hpp"

namespace blowlab::quad {

// 7-15 Gauss-Kronrod pair (QUADPACK dqk15 abscissae/weights on [-1,1]).
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                                  0.381830050505119, 0.417959183673469};

struct PanelEstimate {
  double kronrod = 0.0;
  double gauss = 0.0;
  double error() const { return std::abs(kronrod - gauss); }
};

template <typename F>
PanelEstimate gk15(F&& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  PanelEstimate r;
  double fc = f(c);
  r.kronrod = kWgk[7] * fc;
  r.gauss = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    double x = h * kXgk[i];
    double fsum = f(c - x) + f(c + x);
    r.kronrod += kWgk[i] * fsum;
    if (i % 2 == 1) r.gauss += kWg[i / 2] * fsum;
  }
  r.kronrod *= h;
  r.gauss *= h;
  return r;
}

struct Tolerances {
  double abs_tol = 1e-14;
  double rel_tol = 1e-10;
  int max_depth = 30;
};

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  long panels = 0;
};

namespace detail {

template <typename F>
void integrate_rec(F& f, double a, double b, const Tolerances& tol, int depth,
                   IntegralResult& out) {
  PanelEstimate p = gk15(f, a, b);
  double err = p.error();
  if (err <= std::max(tol.abs_tol, tol.rel_tol * std::abs(p.kronrod)) || depth >= tol.max_depth) {
    if (depth >= tol.max_depth &&
        err > std::max(tol.abs_tol, tol.rel_tol * std::abs(p.kronrod)))
      out.converged = false;
    out.value += p.kronrod;
    out.error += err;
    out.panels += 1;
    return;
  }
  double c = 0.5 * (a + b);
  integrate_rec(f, a, c, tol, depth + 1, out);
  integrate_rec(f, c, b, tol, depth + 1, out);
}

}  // namespace detail

/// Adaptive integral of f over the finite interval [a, b].
template <typename F>
IntegralResult integrate(F&& f, double a, double b, const Tolerances& tol = {}) {
  IntegralResult out;
  if (a == b) return out;
  detail::integrate_rec(f, a, b, tol, 0, out);
  return out;
}

/// log of int_a^b e^{g(t)} dt, computed with per-panel scaling so that g may
/// range over all of double. Returns -inf for an identically-zero integrand.
template <typename G>
double log_integrate(G&& g, double a, double b, const Tolerances& tol = {}, int depth = 0) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double m = std::max({g(a), g(c), g(b)});
  if (m == kNegInf) return kNegInf;
  auto scaled = [&](double t) {
    double v = g(t) - m;
    return v > -745.0 ? std::exp(v) : 0.0;
  };
  PanelEstimate p = gk15(scaled, a, b);
  bool ok = p.error() <= std::max(1e-12, tol.rel_tol * std::abs(p.kronrod));
  if (ok || depth >= tol.max_depth) {
    if (p.kronrod <= 0.0) return kNegInf;
    return m + std::log(p.kronrod);
  }
  double left = log_integrate(g, a, c, tol, depth + 1);
  double right = log_integrate(g, c, b, tol, depth + 1);
  return log_add_exp(left, right);
}

struct ImproperOptions {
  double start = 0.0;       // lower limit of integration
  double t0 = 1.0;          // first horizon; T_j = t0 * 2^j
  int j_default = 20;       // default last doubling of the schedule
  int j_max = 26;           // adaptive extension when undecided at j_default
  double agree_rel = 1e-6;  // Convergent gate on the last three partials
  double growth_min = 1e-3;     // Divergent gate: ratio >= 1+growth_min
  double partial_cap = 1e250;   // runaway cap
  Tolerances panel_tol = {};
};

namespace detail {

/// Mean log2 ratio of consecutive window integrals over the last `n` usable
/// pairs; windows below `floor` are skipped. Returns nullopt when fewer than
/// two usable windows exist.
inline std::optional<double> window_exponent(const std::vector<double>& windows, int n,
                                             double floor) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = windows.size(); i-- > 1 && count < n;) {
    if (windows[i] > floor && windows[i - 1] > floor) {
      sum += std::log2(windows[i] / windows[i - 1]);
      ++count;
    } else {
      break;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

}  // namespace detail

/// Classifies int_{start}^infty f dt on the dyadic horizon schedule.
///
/// Convergent requires the last three partials to agree within agree_rel and
/// a decaying window fit; Divergent requires growth across each of the last
/// four doublings of the schedule (with a non-decaying window fit) or a
/// runaway past partial_cap. Everything else is Inconclusive.
template <typename F>
Verdict classify_improper(F&& f, const ImproperOptions& opt = {}) {
  Verdict v;
  std::vector<double>& horizons = v.evidence.horizons;
  std::vector<double>& partials = v.evidence.partials;
  std::vector<double> windows;

  double acc = 0.0;
  double prev_horizon = opt.start;
  bool quad_trouble = false;

  auto tail_estimate = [&](double mu) {
    if (windows.empty() || mu >= -1e-3) return 0.0;
    double r = std::exp2(mu);
    return windows.back() * r / (1.0 - r);
  };

  for (int j = 0; j <= opt.j_max; ++j) {
    double T = opt.t0 * std::exp2(j);
    if (T <= prev_horizon) continue;
    IntegralResult w = integrate(f, prev_horizon, T, opt.panel_tol);
    if (!w.converged) quad_trouble = true;
    prev_horizon = T;
    acc += w.value;
    windows.push_back(w.value);
    horizons.push_back(T);
    partials.push_back(acc);

    if (w.value < -1e-12 * std::max(1.0, std::abs(acc))) {
      v.label = VerdictLabel::Inconclusive;
      v.evidence.notes.push_back("negative window integral; integrand not nonnegative");
      return v;
    }

    if (acc > opt.partial_cap) {
      v.label = VerdictLabel::Divergent;
      v.evidence.tail_exponent =
          detail::window_exponent(windows, 4, 0.0).value_or(0.0) - 1.0;
      v.evidence.notes.push_back("partial integral exceeded cap");
      return v;
    }

    int n = static_cast<int>(partials.size());
    if (n >= 4) {
      auto mu = detail::window_exponent(windows, 4, 0.0);
      double scale = std::max(std::abs(acc), 1e-300);
      bool recent_agree =
          std::abs(partials[n - 1] - partials[n - 3]) <= opt.agree_rel * scale &&
          std::abs(partials[n - 1] - partials[n - 2]) <= opt.agree_rel * scale;
      bool windows_dead = windows[n - 1] <= 1e-14 * scale && windows[n - 2] <= 1e-14 * scale;
      bool decaying = mu.has_value() && *mu < -0.1;
      if (recent_agree && (decaying || windows_dead)) {
        double mu_v = mu.value_or(-40.0);
        v.label = VerdictLabel::Convergent;
        v.value = acc + tail_estimate(mu_v);
        v.evidence.tail_exponent = mu_v - 1.0;
        if (quad_trouble) {
          v.label = VerdictLabel::Inconclusive;
          v.value.reset();
          v.evidence.notes.push_back("panel refinement did not converge");
        }
        return v;
      }
    }

    if (j >= opt.j_default && static_cast<int>(partials.size()) >= 5) {
      int n2 = static_cast<int>(partials.size());
      bool growing = true;
      for (int i = n2 - 4; i < n2; ++i)
        if (!(partials[i] >= partials[i - 1] * (1.0 + opt.growth_min))) growing = false;
      auto mu = detail::window_exponent(windows, 4, 0.0);
      if (growing && mu.has_value() && *mu >= -0.05) {
        v.label = VerdictLabel::Divergent;
        v.evidence.tail_exponent = *mu - 1.0;
        if (*mu < 0.02)
          v.evidence.notes.push_back("doubling ratio near 1 from above: logarithmic divergence");
        if (quad_trouble) v.evidence.notes.push_back("panel refinement did not converge");
        return v;
      }
    }
  }

  v.label = VerdictLabel::Inconclusive;
  v.evidence.tail_exponent = detail::window_exponent(windows, 4, 0.0).value_or(0.0) - 1.0;
  v.evidence.notes.push_back(quad_trouble ? "panel refinement did not converge"
                                          : "no rule fired by the extended horizon");
  return v;
}

/// Partial integrals of f at the given sorted times (cumulative from times[0]).
template <typename F>
std::vector<double> cumulative(F&& f, const std::vector<double>& times,
                               const Tolerances& tol = {}) {
  std::vector<double> out(times.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    acc += integrate(f, times[i - 1], times[i], tol).value;
    out[i] = acc;
  }
  return out;
}

}  // namespace blowlab::quad
