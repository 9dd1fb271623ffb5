#ifndef MCEST_NUMERICS_DIFF_HPP
#define MCEST_NUMERICS_DIFF_HPP

#include <algorithm>
#include <cmath>

#include "mcest/errors.hpp"

namespace mcest::numerics {

/// Central difference (f(x+h) - f(x-h)) / 2h.
template <class F>
double central_diff(F&& f, double x, double h) {
  if (!(h > 0.0)) throw domain_error("central_diff: step must be positive");
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Step used throughout for derivative checks.
inline double default_diff_step(double x) { return std::max(1e-6 * std::abs(x), 1e-9); }

}  // namespace mcest::numerics

#endif  // MCEST_NUMERICS_DIFF_HPP
