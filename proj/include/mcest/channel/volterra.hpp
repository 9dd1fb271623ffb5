#ifndef MCEST_CHANNEL_VOLTERRA_HPP
#define MCEST_CHANNEL_VOLTERRA_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mcest/channel/hitting.hpp"
#include "mcest/channel/params.hpp"
#include "mcest/errors.hpp"

// Independent numerical route to the two-receiver absorption probabilities.
//
// With single-receiver CDFs F and inter-receiver kernels f,
//   P2 = F_v(d2, t, k, v)  - P1 * f_v(d1 + d2, t, k, v)
//   P1 = F_v(d1, t, k, -v) - P2 * f_v(d1 + d2, t, k, -v)
// where * is time convolution. Kernels vanish at u = 0, so the trapezoidal
// discretisation is explicit and is solved forward in time.

namespace mcest::channel {

struct VolterraSolution {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> p1;  ///< fraction absorbed at RX1 by t, impulsive release
  std::vector<double> p2;

  const std::vector<double>& fraction(Receiver j) const { return j == Receiver::rx1 ? p1 : p2; }

  /// Fraction at time t by linear interpolation on the grid.
  double fraction_at(Receiver j, double t) const {
    const auto& p = fraction(j);
    if (t <= 0.0) return 0.0;
    const double pos = t / dt;
    const auto n = static_cast<std::size_t>(pos);
    if (n + 1 >= p.size()) return p.back();
    const double w = pos - static_cast<double>(n);
    return (1.0 - w) * p[n] + w * p[n + 1];
  }

  /// mu * int_0^t P_j(u) du: expected count under continuous emission.
  double absorbed(Receiver j, double t, double mu) const {
    if (t > times.back() * (1.0 + 1e-12))
      throw domain_error("VolterraSolution::absorbed: t beyond the solved horizon");
    const auto& p = fraction(j);
    double integral = 0.0;
    std::size_t n = 0;
    for (; n + 1 < p.size() && times[n + 1] <= t; ++n) integral += 0.5 * dt * (p[n] + p[n + 1]);
    if (n + 1 < p.size() && t > times[n]) {
      const double tail = t - times[n];
      integral += 0.5 * tail * (p[n] + fraction_at(j, t));
    }
    return mu * integral;
  }
};

inline VolterraSolution volterra_oracle(const EnvParams& p, double t_end, int n_steps) {
  p.validate();
  if (n_steps < 100) throw validation_error("volterra_oracle: n_steps must be >= 100");
  if (!(t_end > 0.0)) throw validation_error("volterra_oracle: t_end must be > 0");
  const auto n = static_cast<std::size_t>(n_steps);
  const double h = t_end / n_steps;
  const double d = p.separation();
  const double D = p.diffusion;

  VolterraSolution sol;
  sol.dt = h;
  sol.times.resize(n + 1);
  sol.p1.assign(n + 1, 0.0);
  sol.p2.assign(n + 1, 0.0);
  std::vector<double> kernel_down(n + 1, 0.0);  // RX1 -> RX2, with the flow
  std::vector<double> kernel_up(n + 1, 0.0);    // RX2 -> RX1, against the flow
  for (std::size_t m = 0; m <= n; ++m) {
    sol.times[m] = h * static_cast<double>(m);
    if (m == 0) continue;
    kernel_down[m] = hitting_rate(d, sol.times[m], p.k, p.v, D);
    kernel_up[m] = hitting_rate(d, sol.times[m], p.k, -p.v, D);
  }

  for (std::size_t step = 1; step <= n; ++step) {
    const double t = sol.times[step];
    // Trapezoid over m = 0..step; the m = step term multiplies a zero kernel.
    double conv_into_2 = 0.5 * sol.p1[0] * kernel_down[step];
    double conv_into_1 = 0.5 * sol.p2[0] * kernel_up[step];
    for (std::size_t m = 1; m < step; ++m) {
      conv_into_2 += sol.p1[m] * kernel_down[step - m];
      conv_into_1 += sol.p2[m] * kernel_up[step - m];
    }
    sol.p2[step] = hitting_cdf(p.d2, t, p.k, p.v, D) - h * conv_into_2;
    sol.p1[step] = hitting_cdf(p.d1, t, p.k, -p.v, D) - h * conv_into_1;
  }

  double violation = 0.0;
  for (std::size_t m = 0; m <= n; ++m) {
    violation = std::max({violation, -sol.p1[m], -sol.p2[m], sol.p1[m] + sol.p2[m] - 1.0});
    if (m > 0)
      violation = std::max({violation, sol.p1[m - 1] - sol.p1[m], sol.p2[m - 1] - sol.p2[m]});
  }
  if (violation > 1e-6)
    throw numerical_error("volterra_oracle: discretisation breaks probability bounds", violation);
  return sol;
}

}  // namespace mcest::channel

#endif  // MCEST_CHANNEL_VOLTERRA_HPP
