#ifndef INTERDICT_TOLERANCES_HPP_
#define INTERDICT_TOLERANCES_HPP_

#include <algorithm>
#include <cmath>

namespace interdict {

// Numerical tolerances shared by the library and its test suites.
namespace tol {

// Relative tolerance for distance ties (path counting, non-retreating rule,
// deterministic routing).
inline constexpr double kTie = 1e-12;

// Row sums of transition blocks and start distributions.
inline constexpr double kStochastic = 1e-12;

// Scenario weights must sum to one within this.
inline constexpr double kWeightSum = 1e-12;

// Conservation and edge-cost identities on evaluated chains.
inline constexpr double kConservation = 1e-10;

// Convergence threshold of the stationary iteration x <- a + x M.
inline constexpr double kIterative = 1e-12;

}  // namespace tol

/// True when a and b agree to within rel * max(1, |a|, |b|).
inline bool nearly_equal(double a, double b, double rel = tol::kTie) {
  if (a == b) return true;
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= rel * scale;
}

/// True when a is smaller than b by more than the tie tolerance.
inline bool strictly_less(double a, double b, double rel = tol::kTie) {
  return a < b && !nearly_equal(a, b, rel);
}

}  // namespace interdict

#endif  // INTERDICT_TOLERANCES_HPP_
