// Verdict: the outcome of classifying an improper integral, with the numeric
// evidence that backs it.

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace blowlab {

enum class VerdictLabel { Divergent, Convergent, Inconclusive };

inline const char* to_string(VerdictLabel label) {
  switch (label) {
    case VerdictLabel::Divergent: return "Divergent";
    case VerdictLabel::Convergent: return "Convergent";
    case VerdictLabel::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct VerdictEvidence {
  std::vector<double> horizons;      // T_j of the dyadic schedule actually run
  std::vector<double> partials;      // integral over [start, T_j]
  double tail_exponent = 0.0;        // fitted log-slope q of the integrand tail
  std::vector<double> eps_schedule;  // filled by criterion-level drivers
  std::vector<std::string> notes;
};

struct Verdict {
  VerdictLabel label = VerdictLabel::Inconclusive;
  std::optional<double> value;  // limit of the integral when Convergent
  VerdictEvidence evidence;

  bool divergent() const { return label == VerdictLabel::Divergent; }
  bool convergent() const { return label == VerdictLabel::Convergent; }
};

}  // namespace blowlab
