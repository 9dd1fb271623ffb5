#ifndef MCEST_NUMERICS_ROOTS_HPP
#define MCEST_NUMERICS_ROOTS_HPP

#include <cmath>
#include <cstdint>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "mcest/errors.hpp"

namespace mcest::numerics {

struct RootSpec {
  double bracket_lo = 0.0;
  double bracket_hi = 1.0;
  double x_tol = 1e-10;
  double f_tol = 1e-12;
  int max_iter = 200;

  void validate() const {
    if (!(bracket_lo < bracket_hi)) throw validation_error("RootSpec: need bracket_lo < bracket_hi");
    if (!(x_tol > 0.0) || !(f_tol > 0.0)) throw validation_error("RootSpec: tolerances must be positive");
    if (max_iter < 1) throw validation_error("RootSpec: max_iter must be >= 1");
  }
};

/// Limits for geometric bracket expansion. The bracket is widened by
/// `factor` on each side per round, never past the limits.
struct BracketExpansion {
  double lo_limit = -INFINITY;
  double hi_limit = INFINITY;
  double factor = 2.0;
  int max_rounds = 30;
};

namespace detail {
inline bool opposite_signs(double a, double b) { return (a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0); }
}  // namespace detail

/// Widens [lo, hi] until f changes sign. Positive brackets grow by
/// multiplication / division, others additively by the current width.
/// Returns the last bracket tried; callers check the sign themselves.
template <class F>
std::pair<double, double> expand_bracket(F&& f, double lo, double hi, const BracketExpansion& ex) {
  double flo = f(lo);
  double fhi = f(hi);
  for (int round = 0; round < ex.max_rounds && !detail::opposite_signs(flo, fhi); ++round) {
    const double width = hi - lo;
    double new_lo = lo > 0.0 ? lo / ex.factor : lo - width;
    double new_hi = hi > 0.0 ? hi * ex.factor : hi + width;
    new_lo = std::max(new_lo, ex.lo_limit);
    new_hi = std::min(new_hi, ex.hi_limit);
    if (new_lo == lo && new_hi == hi) break;
    if (new_lo != lo) { lo = new_lo; flo = f(lo); }
    if (new_hi != hi) { hi = new_hi; fhi = f(hi); }
  }
  return {lo, hi};
}

struct RootResult {
  double root = 0.0;
  int iterations = 0;
};

/// Bracketing root finder (TOMS 748: inverse-cubic / secant steps with
/// bisection safeguards). Stops at |f| <= f_tol or bracket width <= x_tol.
template <class F>
RootResult find_root(F&& f, const RootSpec& spec) {
  spec.validate();
  double lo = spec.bracket_lo;
  double hi = spec.bracket_hi;
  // Values within f_tol count as exact zeros, which TOMS 748 treats as termination.
  auto g = [&](double x) {
    const double v = f(x);
    return std::abs(v) <= spec.f_tol ? 0.0 : v;
  };
  const double flo = g(lo);
  const double fhi = g(hi);
  if (flo == 0.0) return {lo, 0};
  if (fhi == 0.0) return {hi, 0};
  if (!detail::opposite_signs(flo, fhi))
    throw no_root("find_root: no sign change over the bracket", std::abs(flo) < std::abs(fhi) ? lo : hi);
  std::uintmax_t iters = static_cast<std::uintmax_t>(spec.max_iter);
  auto done = [&](double a, double b) { return std::abs(b - a) <= spec.x_tol; };
  const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, flo, fhi, done, iters);
  const double mid = 0.5 * (a + b);
  const bool converged = std::abs(b - a) <= spec.x_tol || g(a) == 0.0 || g(b) == 0.0;
  if (!converged)
    throw non_convergence("find_root: iteration budget exhausted", mid, static_cast<int>(iters));
  const double root = g(a) == 0.0 ? a : (g(b) == 0.0 ? b : mid);
  return {root, static_cast<int>(iters)};
}

}  // namespace mcest::numerics

#endif  // MCEST_NUMERICS_ROOTS_HPP
