#ifndef MCEST_NUMERICS_ERFCX_HPP
#define MCEST_NUMERICS_ERFCX_HPP

#include <cmath>
#include <limits>
#include <numbers>

#include "mcest/errors.hpp"

namespace mcest::numerics {

namespace detail {

// exp(z*z) without the rounding error of forming z*z directly: the high part
// of z has few enough bits that its square is exact.
inline double exp_of_square(double z) {
  const double hi = std::ldexp(std::round(std::ldexp(z, 12)), -12);
  const double lo = z - hi;
  return std::exp(hi * hi) * std::exp((2.0 * hi + lo) * lo);
}

// Laplace continued fraction, modified Lentz. Valid for z >= ~4.
inline double erfcx_continued_fraction(double z) {
  constexpr double tiny = 1e-300;
  double f = z;
  double c = z;
  double d = 0.0;
  for (int n = 1; n < 10000; ++n) {
    const double a = 0.5 * n;
    d = z + a * d;
    if (d == 0.0) d = tiny;
    c = z + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::numbers::inv_sqrtpi / f;
}

}  // namespace detail

/// Scaled complementary error function exp(z^2) erfc(z).
///
/// Overflows to +inf for z below about -26.63, where 2 exp(z^2) exceeds the
/// double range.
inline double erfcx(double z) {
  if (!std::isfinite(z)) throw domain_error("erfcx: non-finite argument");
  if (z < 0.0) {
    if (z < -26.628) return std::numeric_limits<double>::infinity();
    return 2.0 * detail::exp_of_square(z) - erfcx(-z);
  }
  if (z < 6.0) return detail::exp_of_square(z) * std::erfc(z);
  if (z < 5e7) return detail::erfcx_continued_fraction(z);
  return std::numbers::inv_sqrtpi / z * (1.0 - 0.5 / (z * z));
}

/// exp(e) * erfc(z) evaluated without forming either factor on its own.
/// Used wherever a large exponential multiplies a vanishing erfc.
/// Callers that know e - z^2 in closed form pass it as `e_minus_zsq` to avoid
/// the cancellation of two large terms.
inline double exp_times_erfc(double e, double z, double e_minus_zsq) {
  if (z > 0.0) return std::exp(e_minus_zsq) * erfcx(z);
  return std::exp(e) * std::erfc(z);
}

inline double exp_times_erfc(double e, double z) {
  return exp_times_erfc(e, z, e - z * z);
}

}  // namespace mcest::numerics

#endif  // MCEST_NUMERICS_ERFCX_HPP
