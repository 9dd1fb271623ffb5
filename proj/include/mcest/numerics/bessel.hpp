#ifndef MCEST_NUMERICS_BESSEL_HPP
#define MCEST_NUMERICS_BESSEL_HPP

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "mcest/errors.hpp"

// Modified Bessel functions of the first kind, integer order, evaluated in
// log space so that arguments in the hundreds (or far beyond) never overflow.

namespace mcest::numerics {

namespace detail {

inline void require_positive_argument(double x, const char* who) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw domain_error(std::string(who) + ": argument must be positive and finite");
}

// ln I_0(x). Power series for small x (all terms positive), Hankel expansion
// otherwise (all terms positive for order zero).
inline double log_bessel_i0(double x) {
  if (x <= 30.0) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::log(sum);
  }
  const double inv8x = 1.0 / (8.0 * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= odd * odd * inv8x / k;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
}

}  // namespace detail

/// I_m(x) / I_{m-1}(x) for m >= 1, by the continued fraction
/// 1 / (2m/x + 1 / (2(m+1)/x + ...)) with modified Lentz iteration.
inline double bessel_i_forward_ratio(int m, double x, double tol = 1e-15) {
  detail::require_positive_argument(x, "bessel_i_forward_ratio");
  if (m < 1) throw domain_error("bessel_i_forward_ratio: order must be >= 1");
  constexpr double tiny = 1e-300;
  const double inv_x = 2.0 / x;
  double f = tiny;
  double c = f;
  double d = 0.0;
  for (int j = 0; j < 1000000; ++j) {
    const double b = (m + j) * inv_x;
    d = b + d;
    if (d == 0.0) d = tiny;
    c = b + 1.0 / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < tol) return f;
  }
  throw non_convergence("bessel_i_forward_ratio: continued fraction did not converge", f,
                        1000000);
}

/// I_{n-1}(x) / I_n(x) for any integer n, without forming either function.
inline double bessel_ratio(int n, double x) {
  detail::require_positive_argument(x, "bessel_ratio");
  if (n >= 1) return 1.0 / bessel_i_forward_ratio(n, x);
  // I_{n-1}/I_n = I_{1-n}/I_{-n} for n <= 0.
  return bessel_i_forward_ratio(1 - n, x);
}

/// ln I_n(x), x > 0, integer n (I_{-n} = I_n).
inline double log_bessel_i(int n, double x) {
  detail::require_positive_argument(x, "log_bessel_i");
  const int m = std::abs(n);
  double result = detail::log_bessel_i0(x);
  if (m == 0) return result;
  // Downward recurrence of r_k = I_k/I_{k-1}: r_k = 1 / (2k/x + r_{k+1}).
  double r = bessel_i_forward_ratio(m, x);
  result += std::log(r);
  for (int k = m - 1; k >= 1; --k) {
    r = 1.0 / (2.0 * k / x + r);
    result += std::log(r);
  }
  return result;
}

}  // namespace mcest::numerics

#endif  // MCEST_NUMERICS_BESSEL_HPP
