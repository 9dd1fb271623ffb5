#ifndef MCEST_CHANNEL_HITTING_HPP
#define MCEST_CHANNEL_HITTING_HPP

#include <cmath>
#include <numbers>

#include "mcest/errors.hpp"
#include "mcest/numerics/erfcx.hpp"

// First-passage functions for a single absorbing boundary at distance `dist`
// from an impulsive point source, with drift `v` toward the boundary (use -v
// for drift away from it), diffusion D and first-order degradation k.

namespace mcest::channel {

namespace detail {
inline void check_hitting_args(double dist, double t, double k, double v, double D) {
  if (!(dist > 0.0) || !std::isfinite(dist)) throw domain_error("hitting: distance must be > 0");
  if (!(t > 0.0) || !std::isfinite(t)) throw domain_error("hitting: t must be > 0");
  if (!(D > 0.0) || !std::isfinite(D)) throw domain_error("hitting: D must be > 0");
  if (!(k >= 0.0) || !std::isfinite(k) || !std::isfinite(v))
    throw domain_error("hitting: k must be >= 0 and v finite");
}
}  // namespace detail

/// Hitting-rate density f_v(d, t, k, v), 1/s.
inline double hitting_rate(double dist, double t, double k, double v, double D) {
  detail::check_hitting_args(dist, t, k, v, D);
  const double expo = dist * v / (2.0 * D) - dist * dist / (4.0 * D * t) -
                      (v * v / (4.0 * D) + k) * t;
  return dist / std::sqrt(4.0 * std::numbers::pi * D * t * t * t) * std::exp(expo);
}

/// Cumulative hitting probability F_v(d, t, k, v) = int_0^t f_v.
///
/// Closed form 1/2 e^{dv/2D} [e^{-dq} erfc(a - b) + e^{dq} erfc(a + b)] with
/// a = d / sqrt(4Dt), b = sqrt(k' t), q = sqrt(k'/D), k' = k + v^2/4D. Both
/// products are rewritten through erfcx, using dq = 2ab.
inline double hitting_cdf(double dist, double t, double k, double v, double D) {
  detail::check_hitting_args(dist, t, k, v, D);
  const double k_eff = k + v * v / (4.0 * D);
  const double a = dist / std::sqrt(4.0 * D * t);
  const double b = std::sqrt(k_eff * t);
  const double drift = dist * v / (2.0 * D);
  const double gauss = drift - a * a - b * b;
  const double dq = 2.0 * a * b;
  const double minus = numerics::exp_times_erfc(drift - dq, a - b, gauss);
  const double plus = std::exp(gauss) * numerics::erfcx(a + b);
  const double value = 0.5 * (minus + plus);
  return value < 0.0 ? 0.0 : (value > 1.0 ? 1.0 : value);
}

}  // namespace mcest::channel

#endif  // MCEST_CHANNEL_HITTING_HPP
