#pragma once

#include <cmath>
#include <cstddef>

namespace mtlab {

// Default tolerances. Checks that report pass/fail take their threshold from
// LabConfig; these are the values every operation uses internally.
inline constexpr double kTauMeas = 1e-12;  // relative, measure sums
inline constexpr double kTauNum = 1e-9;    // relative, integral comparisons
inline constexpr double kTauRoot = 1e-13;  // |H_p(z) - x| for the inverse
inline constexpr double kTauTie = 1e-12;   // relative, ties between averages

// Largest admissible exponent; z^p overflows long before this matters.
inline constexpr double kMaxExponent = 64.0;

/// True when `candidate` beats `reference` by more than the tie tolerance.
/// Averages are nonnegative, so a zero reference reduces to candidate > 0.
inline bool exceeds(double candidate, double reference) {
  return candidate > reference * (1.0 + kTauTie);
}

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Relative closeness with an absolute floor scaled by `scale`.
inline bool near(double a, double b, double rel, double scale = 1.0) {
  return std::abs(a - b) <= rel * std::fmax(scale, std::fmax(std::abs(a), std::abs(b)));
}

}  // namespace mtlab
