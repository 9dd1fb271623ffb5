#ifndef MCEST_NUMERICS_QUADRATURE_HPP
#define MCEST_NUMERICS_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mcest/errors.hpp"

namespace mcest::numerics {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 1 << 12;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
      throw validation_error("QuadratureSpec: tolerances must be positive");
    if (max_subdivisions < 1)
      throw validation_error("QuadratureSpec: max_subdivisions must be >= 1");
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive 15-point Gauss-Kronrod integral of f over [a, b].
///
/// Succeeds when the error estimate is within abs_tol or rel_tol * |value|;
/// otherwise throws tolerance_not_met carrying the best estimate.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(a <= b)) throw domain_error("integrate: requires a <= b");
  if (a == b) return {};
  const double guard = a + 1e-15;
  auto g = [&](double u) { return f(std::max(u, guard)); };
  const auto depth = static_cast<unsigned>(
      std::max(1.0, std::ceil(std::log2(static_cast<double>(spec.max_subdivisions)))));
  // Boost stops once error <= tol * integral of |f|, which is looser than the
  // target when the integrand cancels; tighten and retry a few times. An error
  // already at the round-off floor of the l1 norm cannot be improved.
  double tol = spec.rel_tol;
  double value = 0.0, error = 0.0, l1 = 0.0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, a, b, depth, tol, &error, &l1);
    if (!std::isfinite(value)) throw tolerance_not_met("integrate: non-finite integral", value, error);
    const double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
    if (error <= target || error <= 64.0 * std::numeric_limits<double>::epsilon() * l1) return {value, error};
    if (!(l1 > 0.0)) break;
    const double next = 0.5 * target / l1;
    if (!(next < tol)) break;
    tol = std::max(next, std::numeric_limits<double>::epsilon());
  }
  throw tolerance_not_met("integrate: tolerance not met (error estimate " + std::to_string(error) + ")", value,
                          error);
}

}  // namespace mcest::numerics

#endif  // MCEST_NUMERICS_QUADRATURE_HPP
