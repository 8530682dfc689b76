// ScalarFunction: declarative description of a nonlinearity f(u) or a time
// weight psi(t). Builtin families carry exact log-space evaluators so that
// criterion integrands like psi(t) e^{l0 t} f(eps e^{-l0 t}) can be formed far
// outside the dynamic range of double.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blowlab/expr.hpp"

namespace blowlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Saturation ceiling for ratios/products per the overflow policy.
inline constexpr double kSaturation = 1e300;
inline constexpr double kLogSaturation = 690.77552789821371;  // log(1e300)

/// log(e^a + e^b) without overflow.
inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

enum class FunKind { Power, ShiftedPowerMix, ExpMinusOne, TimeWeight, Constant, Expression };

enum class FunRole { Nonlinearity, TimeWeight };

inline const char* to_string(FunKind k) {
  switch (k) {
    case FunKind::Power: return "power";
    case FunKind::ShiftedPowerMix: return "shifted-power-mix";
    case FunKind::ExpMinusOne: return "exp-minus-one";
    case FunKind::TimeWeight: return "time-weight";
    case FunKind::Constant: return "constant";
    case FunKind::Expression: return "expression";
  }
  return "?";
}

/// A scalar function of one variable (u for nonlinearities, t for time
/// weights) with declared shape flags used by the profile validator.
class ScalarFunction {
 public:
  FunKind kind() const { return kind_; }
  FunRole role() const { return role_; }
  const std::vector<double>& params() const { return params_; }
  const std::string& source_text() const { return source_; }

  bool claims_convex() const { return convex_; }
  bool claims_nondecreasing() const { return nondecreasing_; }

  /// Human-readable tag for reports and CSV rows.
  std::string describe() const {
    switch (kind_) {
      case FunKind::Power: return "u^" + fmt(params_[0]);
      case FunKind::ShiftedPowerMix: return "(u^" + fmt(params_[0]) + "+u)/2";
      case FunKind::ExpMinusOne: return "exp(u)-1";
      case FunKind::TimeWeight:
        return "(t+1)^-" + fmt(params_[0]) + "*exp(" + fmt(params_[1]) + "*t)";
      case FunKind::Constant: return fmt(params_[0]);
      case FunKind::Expression: return source_;
    }
    return "?";
  }

  double operator()(double s) const {
    switch (kind_) {
      case FunKind::Power: return std::pow(s, params_[0]);
      case FunKind::ShiftedPowerMix: return 0.5 * (std::pow(s, params_[0]) + s);
      case FunKind::ExpMinusOne: return std::expm1(s);
      case FunKind::TimeWeight: return std::pow(s + 1.0, -params_[0]) * std::exp(params_[1] * s);
      case FunKind::Constant: return params_[0];
      case FunKind::Expression:
        return role_ == FunRole::Nonlinearity ? expr_.eval(0.0, s) : expr_.eval(s, 0.0);
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  /// log f(e^x) for nonlinearity-role functions. Exact for builtin families
  /// on the whole real line; expression fallback is limited to the range
  /// where e^x is representable.
  double log_eval(double x) const {
    switch (kind_) {
      case FunKind::Power: return params_[0] * x;
      case FunKind::ShiftedPowerMix: return log_add_exp(params_[0] * x, x) - std::log(2.0);
      case FunKind::ExpMinusOne: {
        // log(e^u - 1) with u = e^x.
        if (x > 700.0) return kInf;  // f astronomically large
        double u = std::exp(x);
        if (u > 36.0) return u + std::log1p(-std::exp(-u));
        if (u > 1e-8) return std::log(std::expm1(u));
        return x + std::log1p(0.5 * u);  // e^u-1 = u(1 + u/2 + ...)
      }
      case FunKind::Constant: return std::log(params_[0]);
      case FunKind::TimeWeight: break;  // wrong role
      case FunKind::Expression: {
        double u = std::exp(x);
        double v = expr_.eval(0.0, u);
        if (v <= 0.0) return kNegInf;
        return std::log(v);
      }
    }
    throw std::logic_error("log_eval: function is not a nonlinearity");
  }

  /// log psi(t) for time-weight-role functions; exact for the builtin family.
  double log_eval_time(double t) const {
    switch (kind_) {
      case FunKind::TimeWeight: return params_[1] * t - params_[0] * std::log1p(t);
      case FunKind::Constant: return std::log(params_[0]);
      case FunKind::Expression: {
        double v = expr_.eval(t, 0.0);
        if (v <= 0.0) return kNegInf;
        return std::log(v);
      }
      default: break;
    }
    throw std::logic_error("log_eval_time: function is not a time weight");
  }

  /// Limit of f(alpha*u)/f(alpha) as alpha -> 0+, when the family supports a
  /// closed form (power-like behaviour at zero). Returns nullopt otherwise.
  std::optional<double> ratio_limit_alpha0(double u) const {
    switch (kind_) {
      case FunKind::Power: return std::pow(u, params_[0]);
      case FunKind::ShiftedPowerMix: return u;  // linear term dominates at 0
      case FunKind::ExpMinusOne: return u;
      default: return std::nullopt;
    }
  }

  /// Log-space variant of ratio_limit_alhpa0 (argument and result in logs).
  std::optional<double> log_ratio_limit_alpha0(double log_u) const {
    switch (kind_) {
      case FunKind::Power: return params_[0] * log_u;
      case FunKind::ShiftedPowerMix: return log_u;
      case FunKind::ExpMinusOne: return log_u;
      default: return std::nullopt;
    }
  }

  // -- factories --------------------------------------------------------

  static ScalarFunction power(double p) {
    if (!(p > 0)) throw std::invalid_argument("power family requires p > 0");
    ScalarFunction f;
    f.kind_ = FunKind::Power;
    f.role_ = FunRole::Nonlinearity;
    f.params_ = {p};
    f.convex_ = p >= 1.0;
    f.nondecreasing_ = true;
    return f;
  }

  static ScalarFunction shifted_power_mix(double p = 2.0) {
    if (!(p >= 1)) throw std::invalid_argument("shifted-power-mix requires p >= 1");
    ScalarFunction f;
    f.kind_ = FunKind::ShiftedPowerMix;
    f.role_ = FunRole::Nonlinearity;
    f.params_ = {p};
    f.convex_ = true;
    f.nondecreasing_ = true;
    return f;
  }

  static ScalarFunction exp_minus_one() {
    ScalarFunction f;
    f.kind_ = FunKind::ExpMinusOne;
    f.role_ = FunRole::Nonlinearity;
    f.convex_ = true;
    f.nondecreasing_ = true;
    return f;
  }

  /// psi(t) = (t+1)^{-sigma} e^{k t}
  static ScalarFunction time_weight(double sigma, double k) {
    ScalarFunction f;
    f.kind_ = FunKind::TimeWeight;
    f.role_ = FunRole::TimeWeight;
    f.params_ = {sigma, k};
    return f;
  }

  static ScalarFunction constant(double c, FunRole role = FunRole::TimeWeight) {
    if (c < 0) throw std::invalid_argument("constant weight must be nonnegative");
    ScalarFunction f;
    f.kind_ = FunKind::Constant;
    f.role_ = role;
    f.params_ = {c};
    return f;
  }

  static ScalarFunction expression(std::string_view text, FunRole role,
                                   bool claims_convex = false,
                                   bool claims_nondecreasing = false) {
    ScalarFunction f;
    f.kind_ = FunKind::Expression;
    f.role_ = role;
    f.expr_ = expr::Expr::parse(text);
    f.source_ = f.expr_.source();
    if (role == FunRole::Nonlinearity && f.expr_.uses_t())
      throw std::invalid_argument("nonlinearity expression must not reference t");
    if (role == FunRole::TimeWeight && f.expr_.uses_u())
      throw std::invalid_argument("time-weight expression must not reference u");
    f.convex_ = claims_convex;
    f.nondecreasing_ = claims_nondecreasing;
    return f;
  }

 private:
  FunKind kind_ = FunKind::Constant;
  FunRole role_ = FunRole::TimeWeight;
  std::vector<double> params_{0.0};
  std::string source_;
  expr::Expr expr_;
  bool convex_ = false;
  bool nondecreasing_ = false;

  static std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
  }
};

struct ValidationIssue {
  std::string what;
};

struct ValidationReport {
  bool ok = true;
  std::vector<ValidationIssue> issues;
  void fail(std::string msg) {
    ok = false;
    issues.push_back({std::move(msg)});
  }
};

struct ValidationOptions {
  double s_max = 1e4;    // positivity sampled on (0, s_max]
  double t_max = 100.0;  // time weights sampled on [0, t_max]
  int samples = 400;
};

/// Checks the standing assumptions on f: f(0)=0, f>0 on a sampled log grid,
/// and consistency of the declared monotonicity/convexity flags with finite
/// differences on that grid.
inline ValidationReport validate_nonlinearity(const ScalarFunction& f,
                                              const ValidationOptions& opt = {}) {
  ValidationReport rep;
  if (f.role() != FunRole::Nonlinearity) {
    rep.fail("function has time-weight role, expected a nonlinearity");
    return rep;
  }
  double f0 = f(0.0);
  if (!(std::abs(f0) <= 1e-12)) rep.fail("f(0) = " + std::to_string(f0) + ", expected 0");

  std::vector<double> s(opt.samples), fs(opt.samples);
  double lo = std::log(1e-6), hi = std::log(opt.s_max);
  for (int i = 0; i < opt.samples; ++i) {
    s[i] = std::exp(lo + (hi - lo) * i / (opt.samples - 1));
    fs[i] = f(s[i]);
    if (!(fs[i] > 0.0) && std::isfinite(fs[i]))
      rep.fail("f(" + std::to_string(s[i]) + ") = " + std::to_string(fs[i]) +
               " is not positive");
  }
  if (!rep.ok) return rep;

  if (f.claims_nondecreasing()) {
    for (int i = 0; i + 1 < opt.samples; ++i)
      if (std::isfinite(fs[i + 1]) && fs[i + 1] < fs[i] * (1.0 - 1e-12)) {
        rep.fail("declared nondecreasing but f decreases near s = " + std::to_string(s[i]));
        break;
      }
  }
  if (f.claims_convex()) {
    // Convexity via second differences on a uniform grid over [0, s_mid];
    // the log grid above is too uneven for stable second differences.
    int n = opt.samples;
    double smax = std::min(opt.s_max, 30.0);  // stay clear of overflow for exp-type f
    double h = smax / n;
    for (int i = 1; i + 1 < n; ++i) {
      double a = f(i * h - h), b = f(i * h), c = f(i * h + h);
      if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c))) break;
      double second = a - 2 * b + c;
      if (second < -1e-9 * std::max({std::abs(a), std::abs(c), 1.0})) {
        rep.fail("declared convex but second difference is negative near s = " +
                 std::to_string(i * h));
        break;
      }
    }
  }
  return rep;
}

/// Checks psi >= 0 on a sampled [0, t_max].
inline ValidationReport validate_time_weight(const ScalarFunction& psi,
                                             const ValidationOptions& opt = {}) {
  ValidationReport rep;
  if (psi.role() != FunRole::TimeWeight) {
    rep.fail("function has nonlinearity role, expected a time weight");
    return rep;
  }
  for (int i = 0; i <= opt.samples; ++i) {
    double t = opt.t_max * i / opt.samples;
    double v = psi(t);
    if (std::isfinite(v) && v < 0.0) {
      rep.fail("psi(" + std::to_string(t) + ") = " + std::to_string(v) + " is negative");
      return rep;
    }
  }
  return rep;
}

}  // namespace blowlab
