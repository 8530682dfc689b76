// NonlinearityProfile: a nonlinearity f together with its multiplicative
// minorant f_m(u) = inf_{0<a<1} f(au)/f(a) and majorant f_M (sup of the same
// ratio), the edge points v1 (left edge of positivity of f_m) and m* (right
// edge of finiteness of f_M), the potentials F, F_m, F_M with their inverses,
// the Osgood admissibility verdict, and quasi-multiplicativity constants.
//
// All alpha-scans run in log space: ratios that would overflow double are
// saturated at 1e300 and recorded through m* instead of aborting.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blowlab/quadrature.hpp"
#include "blowlab/scalar_function.hpp"
#include "blowlab/verdict.hpp"

namespace blowlab {

struct ProfileOptions {
  int alpha_points = 2048;   // log-spaced in [alpha_min, 1-alpha_min]
  double alpha_min = 1e-8;
  int u_points = 1024;       // table grid, log-spaced in [u_min, u_max]
  double u_min = 1e-8;
  double u_max = 1e8;
};

enum class PotentialKind { F, Fm, FM };

inline const char* to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::F: return "F";
    case PotentialKind::Fm: return "F_m";
    case PotentialKind::FM: return "F_M";
  }
  return "?";
}

struct QuasiMultOptions {
  double alpha_lo = 1e-6;
  double u_lo = 1e-4;
  double u_hi = 1e4;
  int points = 256;  // per axis
};

struct QuasiMultResult {
  double gamma1 = 0.0;
  double gamma2 = kInf;
  bool quasi_multiplicative = false;
  double gamma1_inner = 0.0;  // gamma1 restricted to u <= u_hi/16 (trend evidence)
  double minimizer_alpha = 0.0, minimizer_u = 0.0;
  double maximizer_alpha = 0.0, maximizer_u = 0.0;
};

class NonlinearityProfile {
 public:
  explicit NonlinearityProfile(ScalarFunction f, ProfileOptions opt = {})
      : f_(std::move(f)), opt_(opt) {
    if (f_.role() != FunRole::Nonlinearity)
      throw std::invalid_argument("profile requires a nonlinearity-role function");
    auto rep = validate_nonlinearity(f_);
    if (!rep.ok) {
      std::string msg = "nonlinearity failed validation:";
      for (const auto& i : rep.issues) msg += " " + i.what + ";";
      throw std::invalid_argument(msg);
    }
    build_alpha_cache();
    build_tables();
    detect_v1();
    detect_m_star();
    osgood_ = run_osgood();
    v_inf_ = compute_v_inf();
  }

  const ScalarFunction& f() const { return f_; }
  const ProfileOptions& options() const { return opt_; }
  double f1() const { return f_at_1_; }

  double v1() const { return v1_; }
  double m_star() const { return m_star_; }
  bool m_star_saturated() const { return m_star_saturated_; }
  double v_inf() const { return v_inf_; }
  const Verdict& osgood() const { return osgood_; }

  const std::vector<double>& u_grid_log() const { return log_u_; }
  const std::vector<double>& fm_table_log() const { return log_fm_; }
  const std::vector<double>& fM_table_log() const { return log_fM_; }

  /// f_m(u) by direct scan over the alpha grid with endpoint-limit refinement.
  double minorant(double u) const {
    if (!(u >= 0)) throw std::invalid_argument("minorant: u must be nonnegative");
    if (u == 0.0) return 0.0;
    double lr = scan_log_min(std::log(u));
    return lr == kNegInf ? 0.0 : std::exp(std::min(lr, kLogSaturation));
  }

  /// f_M(u) by direct scan; +infinity once u >= m*.
  double majorant(double u) const {
    if (!(u >= 0)) throw std::invalid_argument("majorant: u must be nonnegative");
    if (u == 0.0) return 0.0;
    double lr = scan_log_max(std::log(u));
    if (lr >= kLogSaturation) return kInf;
    return std::exp(lr);
  }

  /// Interpolated-table variants used by the integral machinery.
  double log_minorant_interp(double log_u) const { return interp(log_fm_, log_u); }
  double log_majorant_interp(double log_u) const { return interp(log_fM_, log_u); }

  /// F(v) = int_v^inf dw/f, F_m(v) = int_v^inf dw/f_m (v > v1),
  /// F_M(v) = int_v^{m*} dw/f_M (0 < v < m*). Strictly decreasing in v.
  double potential(PotentialKind kind, double v) const {
    check_domain(kind, v);
    return tail_integral(kind, v);
  }

  /// Whether the chosen potential is well-defined (its tail converges).
  bool potential_defined(PotentialKind kind) const {
    switch (kind) {
      case PotentialKind::F: return tail_convergent_for_f();
      case PotentialKind::Fm: return osgood_.convergent();
      case PotentialKind::FM: return std::isfinite(m_star_) || fM_tail_convergent();
    }
    return false;
  }

  /// log F(v) given log v; exact continuation below the table for the
  /// log-coordinate callers (corollary integrand at huge horizons).
  double log_potential(PotentialKind kind, double log_v) const {
    if (log_v > -700.0) {
      double p = potential(kind, std::exp(log_v));
      return std::log(p);
    }
    if (kind == PotentialKind::Fm && v1_ > 0.0)
      throw std::domain_error("log_potential: v below v1");
    // F(v) = F(u_ref) + int_v^{u_ref} dw/f with f ~ c0 w^{q0} near zero.
    double q0, log_c0;
    low_end_power(kind, q0, log_c0);
    double u_ref = opt_.u_min;
    double base = potential(kind, u_ref);
    double log_piece;
    if (q0 > 1.0 + 1e-9) {
      // int_v^{u_ref} w^{-q0}/c0 dw ~ v^{1-q0} / ((q0-1) c0)
      log_piece = (1.0 - q0) * log_v - std::log(q0 - 1.0) - log_c0;
    } else {
      // q0 ~ 1: (log(u_ref) - log v)/c0
      log_piece = std::log(std::log(u_ref) - log_v) - log_c0;
    }
    return log_add_exp(std::log(base), log_piece);
  }

  /// Bracketed bisection inverse of the chosen potential.
  /// Stops when |potential(v) - w| <= 1e-10 max(1, w).
  double invert_potential(PotentialKind kind, double w) const {
    if (!(w > 0)) throw std::domain_error("invert_potential: w must be positive");
    if (kind == PotentialKind::Fm && std::isfinite(v_inf_) && w >= v_inf_)
      throw std::domain_error("invert_potential: w = " + std::to_string(w) +
                              " outside attained range (0, " + std::to_string(v_inf_) +
                              ") of F_m");
    const double tol = 1e-10 * std::max(1.0, w);

    // Bracket in v: potential is strictly decreasing.
    double lo = domain_left(kind), hi = domain_right(kind);
    // Geometric search for a finite working bracket [a, b] with
    // P(a) >= w >= P(b).
    double a = std::sqrt(std::max(lo, 1e-12) * (std::isfinite(hi) ? hi : 1.0));
    if (!std::isfinite(hi)) a = std::max(1.0, 2.0 * lo);
    double b = a;
    double pa = tail_integral(kind, a);
    int guard = 0;
    while (pa < w) {
      a = lo + 0.5 * (a - lo);
      if (kind != PotentialKind::Fm || v1_ == 0.0) a = std::max(a, 1e-300);
      pa = tail_integral(kind, a);
      if (++guard > 2000)
        throw std::domain_error("invert_potential: w above attained range");
    }
    double pb = tail_integral(kind, b);
    guard = 0;
    while (pb > w) {
      b = std::isfinite(hi) ? hi - 0.5 * (hi - b) : 2.0 * b;
      pb = tail_integral(kind, b);
      if (++guard > 2000)
        throw std::domain_error("invert_potential: w below attained range");
    }

    for (int it = 0; it < 200; ++it) {
      double mid = pick_mid(kind, a, b, hi);
      double pm = tail_integral(kind, mid);
      if (std::abs(pm - w) <= tol) return mid;
      if (pm > w)
        a = mid;
      else
        b = mid;
      if (b - a <= 1e-15 * std::max(1.0, b)) return 0.5 * (a + b);
    }
    return 0.5 * (a + b);
  }

  /// inf/sup of f(au)/(f(a) f(u)) over an (alpha, u) grid.
  QuasiMultResult quasi_mult_constants(const QuasiMultOptions& q = {}) const {
    QuasiMultResult r;
    double log_f1 = log_f_at_1_;
    (void)log_f1;
    double lo_a = std::log(q.alpha_lo), hi_a = std::log(1.0 - q.alpha_lo);
    double lo_u = std::log(q.u_lo), hi_u = std::log(q.u_hi);
    double best_min = kInf, best_max = kNegInf;
    double inner_min = kInf;
    double inner_cut = hi_u - std::log(16.0);
    for (int i = 0; i < q.points; ++i) {
      double la = lo_a + (hi_a - lo_a) * i / (q.points - 1);
      double lfa = f_.log_eval(la);
      if (lfa == kNegInf) continue;
      for (int j = 0; j < q.points; ++j) {
        double lu = lo_u + (hi_u - lo_u) * j / (q.points - 1);
        double lratio = f_.log_eval(la + lu) - lfa - f_.log_eval(lu);
        if (std::isnan(lratio)) continue;
        if (lratio < best_min) {
          best_min = lratio;
          r.minimizer_alpha = std::exp(la);
          r.minimizer_u = std::exp(lu);
        }
        if (lratio > best_max) {
          best_max = lratio;
          r.maximizer_alpha = std::exp(la);
          r.maximizer_u = std::exp(lu);
        }
        if (lu <= inner_cut) inner_min = std::min(inner_min, lratio);
      }
    }
    r.gamma1 = best_min == kInf ? 0.0 : std::exp(std::max(best_min, -745.0));
    r.gamma2 = best_max >= kLogSaturation ? kInf : std::exp(best_max);
    r.gamma1_inner = inner_min == kInf ? 0.0 : std::exp(std::max(inner_min, -745.0));
    bool stable = r.gamma1 > 0.0 && r.gamma1 >= 0.8 * r.gamma1_inner;
    r.quasi_multiplicative = stable && std::isfinite(r.gamma2);
    return r;
  }

 private:
  ScalarFunction f_;
  ProfileOptions opt_;
  std::vector<double> log_alpha_, log_f_alpha_;
  std::vector<double> log_u_, log_fm_, log_fM_;
  double f_at_1_ = 1.0, log_f_at_1_ = 0.0;
  double v1_ = 0.0;
  double m_star_ = kInf;
  bool m_star_saturated_ = false;
  double v_inf_ = kInf;
  Verdict osgood_;

  void build_alpha_cache() {
    int n = opt_.alpha_points;
    log_alpha_.resize(n);
    log_f_alpha_.resize(n);
    double lo = std::log(opt_.alpha_min), hi = std::log(1.0 - opt_.alpha_min);
    for (int i = 0; i < n; ++i) {
      log_alpha_[i] = lo + (hi - lo) * i / (n - 1);
      log_f_alpha_[i] = f_.log_eval(log_alpha_[i]);
    }
    f_at_1_ = f_(1.0);
    log_f_at_1_ = std::log(f_at_1_);
  }

  double scan_log_min(double log_u) const {
    double best = f_.log_eval(log_u) - log_f_at_1_;  // alpha -> 1 endpoint
    if (auto lim = f_.log_ratio_limit_alpha0(log_u)) best = std::min(best, *lim);
    for (std::size_t i = 0; i < log_alpha_.size(); ++i) {
      if (log_f_alpha_[i] == kNegInf) continue;
      double lr = f_.log_eval(log_alpha_[i] + log_u) - log_f_alpha_[i];
      if (lr < best) best = lr;
    }
    return best;
  }

  double scan_log_max(double log_u) const {
    double best = f_.log_eval(log_u) - log_f_at_1_;
    if (auto lim = f_.log_ratio_limit_alpha0(log_u)) best = std::max(best, *lim);
    for (std::size_t i = 0; i < log_alpha_.size(); ++i) {
      if (log_f_alpha_[i] == kNegInf) continue;
      double lr = f_.log_eval(log_alpha_[i] + log_u) - log_f_alpha_[i];
      if (lr > best) best = lr;
    }
    return best;
  }

  void build_tables() {
    int n = opt_.u_points;
    log_u_.resize(n);
    log_fm_.resize(n);
    log_fM_.resize(n);
    double lo = std::log(opt_.u_min), hi = std::log(opt_.u_max);
    for (int j = 0; j < n; ++j) {
      log_u_[j] = lo + (hi - lo) * j / (n - 1);
      log_fm_[j] = scan_log_min(log_u_[j]);
      log_fM_[j] = scan_log_max(log_u_[j]);
    }
  }

  void detect_v1() {
    // First table index where f_m is positive (log above the saturation
    // floor), refined by bisection on u.
    const double floor_log = -kLogSaturation;
    int first_pos = -1;
    for (std::size_t j = 0; j < log_u_.size(); ++j)
      if (log_fm_[j] > floor_log) {
        first_pos = static_cast<int>(j);
        break;
      }
    if (first_pos < 0) {
      v1_ = 1.0;  // f_m vanishes on the whole sampled range
      return;
    }
    if (first_pos == 0) {
      v1_ = 0.0;
      return;
    }
    double lo = log_u_[first_pos - 1], hi = log_u_[first_pos];
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      if (scan_log_min(mid) > floor_log)
        hi = mid;
      else
        lo = mid;
    }
    v1_ = std::min(std::exp(hi), 1.0);
  }

  void detect_m_star() {
    int first_sat = -1;
    for (std::size_t j = 0; j < log_u_.size(); ++j)
      if (log_fM_[j] >= kLogSaturation) {
        first_sat = static_cast<int>(j);
        break;
      }
    if (first_sat < 0) {
      m_star_ = kInf;
      return;
    }
    m_star_saturated_ = true;
    if (first_sat == 0) {
      m_star_ = opt_.u_min;
      return;
    }
    double lo = log_u_[first_sat - 1], hi = log_u_[first_sat];
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      if (scan_log_max(mid) >= kLogSaturation)
        hi = mid;
      else
        lo = mid;
    }
    m_star_ = std::exp(lo);
  }

  Verdict run_osgood() const {
    // f_m identically zero at/above 1 -> Divergent by definition.
    if (v1_ >= 1.0 && scan_log_min(std::log(1.5)) == kNegInf) {
      Verdict v;
      v.label = VerdictLabel::Divergent;
      v.evidence.notes.push_back("f_m vanishes above 1; 1/f_m is not finite");
      return v;
    }
    auto integrand = [this](double s) {
      double lf = log_minorant_interp(std::log(s));
      return std::exp(std::clamp(-lf, -kLogSaturation, kLogSaturation));
    };
    quad::ImproperOptions io;
    io.start = 1.0;
    io.t0 = 2.0;
    return quad::classify_improper(integrand, io);
  }

  double compute_v_inf() const {
    if (!osgood_.convergent()) return kInf;
    // v_inf = int_{v1}^inf dw/f_m; the upper part is the Osgood value, the
    // lower part is probed on windows shrinking toward v1.
    double upper = *osgood_.value;
    double lower = 0.0;
    double edge = v1_;
    double width = 1.0 - edge;
    if (width <= 0) return upper;
    double prev = edge + width;
    for (int k = 1; k <= 48; ++k) {
      double cur = edge + width * std::exp2(-k);
      auto integrand = [this](double s) {
        double lf = log_minorant_at(s);
        return std::exp(std::clamp(-lf, -kLogSaturation, kLogSaturation));
      };
      double w = quad::integrate(integrand, cur, prev).value;
      lower += w;
      prev = cur;
      if (lower > 1e12) return kInf;  // divergent at the edge
      if (w < 1e-12 * std::max(1.0, lower) && k > 8) return upper + lower;
    }
    return kInf;
  }

  double log_minorant_at(double s) const { return log_minorant_interp(std::log(s)); }

  double interp(const std::vector<double>& table, double log_u) const {
    const auto& xs = log_u_;
    int n = static_cast<int>(xs.size());
    if (log_u <= xs.front()) return extrapolate(table, 0, 1, log_u);
    if (log_u >= xs.back()) return extrapolate(table, n - 2, n - 1, log_u);
    double step = (xs.back() - xs.front()) / (n - 1);
    int j = std::min(n - 2, static_cast<int>((log_u - xs.front()) / step));
    while (j > 0 && log_u < xs[j]) --j;
    while (j < n - 2 && log_u > xs[j + 1]) ++j;
    double a = table[j], b = table[j + 1];
    if (a == kNegInf || b == kNegInf) return kNegInf;
    if (a == kInf || b == kInf) return kInf;
    double w = (log_u - xs[j]) / (xs[j + 1] - xs[j]);
    return a + w * (b - a);
  }

  double extrapolate(const std::vector<double>& table, int j0, int j1, double log_u) const {
    double a = table[j0], b = table[j1];
    if (!std::isfinite(a) || !std::isfinite(b)) return log_u < log_u_.front() ? a : b;
    double slope = (b - a) / (log_u_[j1] - log_u_[j0]);
    return a + slope * (log_u - log_u_[j0]);
  }

  void low_end_power(PotentialKind kind, double& q0, double& log_c0) const {
    double x0 = log_u_[0], x1 = log_u_[0] + 1.0;
    double y0, y1;
    switch (kind) {
      case PotentialKind::F:
        y0 = f_.log_eval(x0);
        y1 = f_.log_eval(x1);
        break;
      case PotentialKind::Fm:
        y0 = log_minorant_interp(x0);
        y1 = log_minorant_interp(x1);
        break;
      case PotentialKind::FM:
        y0 = log_majorant_interp(x0);
        y1 = log_majorant_interp(x1);
        break;
      default: y0 = y1 = 0.0;
    }
    q0 = (y1 - y0) / (x1 - x0);
    log_c0 = y0 - q0 * x0;
  }

  double domain_left(PotentialKind kind) const {
    switch (kind) {
      case PotentialKind::F: return 0.0;
      case PotentialKind::Fm: return v1_;
      case PotentialKind::FM: return 0.0;
    }
    return 0.0;
  }

  double domain_right(PotentialKind kind) const {
    return kind == PotentialKind::FM ? m_star_ : kInf;
  }

  double pick_mid(PotentialKind kind, double a, double b, double hi) const {
    if (std::isfinite(hi) && b > 0.5 * hi) return 0.5 * (a + b);  // near m*
    double la = std::log(std::max(a, 1e-300)), lb = std::log(b);
    if (kind == PotentialKind::Fm && v1_ > 0.0)
      return v1_ + 0.5 * ((a - v1_) + (b - v1_));
    return std::exp(0.5 * (la + lb));
  }

  void check_domain(PotentialKind kind, double v) const {
    switch (kind) {
      case PotentialKind::F:
        if (!(v > 0)) throw std::domain_error("potential F: v must be positive");
        if (!tail_convergent_for_f())
          throw std::domain_error(
              "potential F: int^inf dw/f diverges; run osgood_check for the admissibility "
              "analysis");
        break;
      case PotentialKind::Fm:
        if (!(v > v1_))
          throw std::domain_error("potential F_m: v = " + std::to_string(v) +
                                  " not above v1 = " + std::to_string(v1_));
        if (!osgood_.convergent())
          throw std::domain_error(
              "potential F_m: Osgood integral diverges (see osgood_check); F_m is undefined");
        break;
      case PotentialKind::FM:
        if (!(v > 0) || !(v < m_star_))
          throw std::domain_error("potential F_M: v must lie in (0, m*)");
        if (!std::isfinite(m_star_) && !fM_tail_convergent())
          throw std::domain_error("potential F_M: int^{m*} dw/f_M diverges");
        break;
    }
  }

  mutable std::optional<bool> f_tail_ok_, fM_tail_ok_;

  bool tail_convergent_for_f() const {
    if (!f_tail_ok_) {
      auto integrand = [this](double s) {
        double v = f_(s);
        return v > 0 ? 1.0 / v : kSaturation;
      };
      quad::ImproperOptions io;
      io.start = 1.0;
      io.t0 = 2.0;
      f_tail_ok_ = quad::classify_improper(integrand, io).convergent();
    }
    return *f_tail_ok_;
  }

  bool fM_tail_convergent() const {
    if (std::isfinite(m_star_)) return true;  // 1/f_M -> 0 fast at saturation edge
    if (!fM_tail_ok_) {
      auto integrand = [this](double s) {
        double lf = log_majorant_interp(std::log(s));
        return std::exp(std::clamp(-lf, -kLogSaturation, kLogSaturation));
      };
      quad::ImproperOptions io;
      io.start = 1.0;
      io.t0 = 2.0;
      fM_tail_ok_ = quad::classify_improper(integrand, io).convergent();
    }
    return *fM_tail_ok_;
  }

  /// Tail integral of 1/f_kind from v to the kind's right edge, with a
  /// power-fit tail beyond the last window.
  double tail_integral(PotentialKind kind, double v) const {
    check_domain(kind, v);
    auto integrand = [this, kind](double s) {
      double ls = std::log(s);
      double lf = kind == PotentialKind::F    ? f_.log_eval(ls)
                  : kind == PotentialKind::Fm ? log_minorant_interp(ls)
                                              : log_majorant_interp(ls);
      return std::exp(std::clamp(-lf, -kLogSaturation, kLogSaturation));
    };

    double right = domain_right(kind);
    if (std::isfinite(right)) {
      // Finite upper edge m*: plain adaptive integral (integrand -> 0 there).
      return quad::integrate(integrand, v, right).value;
    }

    double acc = 0.0, prev = v, w_prev = 0.0;
    double ratio = 0.5;
    for (int j = 1; j <= 64; ++j) {
      double cur = v * std::exp2(j);
      double w = quad::integrate(integrand, prev, cur).value;
      if (w_prev > 0 && w > 0) ratio = w / w_prev;
      acc += w;
      prev = cur;
      w_prev = w;
      if (w <= 1e-11 * std::max(acc, 1e-300) && j >= 6) break;
      if (j >= 12 && ratio >= 0.995)
        throw std::domain_error("potential: tail windows not decaying; integral diverges");
    }
    if (ratio < 1.0 && w_prev > 0) acc += w_prev * ratio / (1.0 - ratio);
    return acc;
  }
};

}  // namespace blowlab
