#ifndef MCEST_INFERENCE_GAMMA_HPP
#define MCEST_INFERENCE_GAMMA_HPP

#include <cmath>

#include "mcest/channel/cir.hpp"
#include "mcest/inference/problem.hpp"

// Derivatives of the asymptotic windowed count with respect to each unknown.
//
// ln N_j = ln(mu delta) + s_j d_j v / 2D - d_j kappa + ln(1 - e^{-2 d_o kappa})
//          - ln(1 - e^{-2 d kappa}),
// with d_o = d - d_j the distance from the transmitter to the other receiver
// and s_j = -1, +1 for RX1, RX2. Writing q(a) = 1 / (e^{2 a kappa} - 1):
//   d/d kappa ln N_j = -d_j + 2 d_o q(d_o) - 2 d q(d)
//   d kappa / dv = v / (4 D^2 kappa),  d kappa / dk = 1 / (2 D kappa).
// Noise is additive and constant, so it drops out.

namespace mcest::inference {

namespace detail {

inline double q_factor(double a, double kappa) { return 1.0 / std::expm1(2.0 * a * kappa); }

inline double dlog_dkappa(Receiver j, const EnvParams& p) {
  const double kappa = p.kappa();
  const double d = p.separation();
  const double dj = p.distance(j);
  const double other = d - dj;
  return -dj + 2.0 * other * q_factor(other, kappa) - 2.0 * d * q_factor(d, kappa);
}

}  // namespace detail

/// dN_j / d(unknown) at p, analytic.
inline double gamma_deriv(Unknown u, Receiver j, const EnvParams& p) {
  const double n = channel::asymptotic_signal(j, p);
  const double kappa = p.kappa();
  const double D = p.diffusion;
  switch (u) {
    case Unknown::mu:
      return n / p.mu;
    case Unknown::v: {
      const double explicit_part = EnvParams::flow_sign(j) * p.distance(j) / (2.0 * D);
      const double dkappa = p.v / (4.0 * D * D * kappa);
      return n * (explicit_part + detail::dlog_dkappa(j, p) * dkappa);
    }
    case Unknown::k:
      return n * detail::dlog_dkappa(j, p) / (2.0 * D * kappa);
    case Unknown::d2: {
      // d fixed: d2 grows while d1 shrinks by the same amount.
      const double drift = p.v / (2.0 * D);
      if (j == Receiver::rx2)
        return n * (drift - kappa - 2.0 * kappa * detail::q_factor(p.d1, kappa));
      return n * (drift + kappa + 2.0 * kappa * detail::q_factor(p.d2, kappa));
    }
  }
  return 0.0;
}

}  // namespace mcest::inference

#endif  // MCEST_INFERENCE_GAMMA_HPP
