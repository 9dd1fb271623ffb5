#ifndef MCEST_HARNESS_PLATEAU_HPP
#define MCEST_HARNESS_PLATEAU_HPP

#include <cmath>

#include "mcest/channel/cir.hpp"
#include "mcest/errors.hpp"

namespace mcest::harness {

/// First t on a 0.1 s grid where both windowed counts are within `rel_tol`
/// of their asymptotic values.
inline double plateau_onset(const channel::EnvParams& p, double rel_tol = 1e-2, double t_max = 200.0) {
  p.validate();
  using channel::Receiver;
  const double n1 = channel::asymptotic_signal(Receiver::rx1, p);
  const double n2 = channel::asymptotic_signal(Receiver::rx2, p);
  for (int i = 1;; ++i) {
    const double t = p.delta + 0.1 * i;
    if (t > t_max) throw numerical_error("plateau_onset: no plateau before t_max", t_max);
    const double e1 = std::abs(channel::received_signal(Receiver::rx1, t, p) - n1) / n1;
    const double e2 = std::abs(channel::received_signal(Receiver::rx2, t, p) - n2) / n2;
    if (e1 < rel_tol && e2 < rel_tol) return t;
  }
}

/// Observation windows start after twice the plateau onset.
inline double default_first_window_end(const channel::EnvParams& p) { return 2.0 * plateau_onset(p); }

}  // namespace mcest::harness

#endif  // MCEST_HARNESS_PLATEAU_HPP
