#ifndef MCEST_SIMULATOR_CONFIG_HPP
#define MCEST_SIMULATOR_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "mcest/channel/params.hpp"
#include "mcest/errors.hpp"

namespace mcest::simulator {

using channel::EnvParams;

/// Monte Carlo controls.
struct SimConfig {
  double t_sim = 0.001;       ///< time step, s
  double t_end = 10.0;        ///< horizon, s
  int realizations = 2000;
  std::uint64_t seed = 1;
  /// End times of the observation windows [t - delta, t]; may be empty.
  std::vector<double> window_schedule;
  /// Spacing used by make_window_schedule; <= 0 means 2 delta.
  double observation_gap = 0.0;
  /// Brownian-bridge test for boundary crossings between step endpoints.
  /// Without it, end-of-step checks miss excursions and undercount absorption.
  bool crossing_correction = true;
  /// Let particles far from both receivers cover several steps per move.
  bool leap_far_particles = true;

  double gap(const EnvParams& p) const { return observation_gap > 0.0 ? observation_gap : 2.0 * p.delta; }

  /// Number of whole steps covering [0, t_end].
  long steps() const { return static_cast<long>(std::ceil(t_end / t_sim - 1e-9)); }

  /// Step index closest to time t.
  long step_index(double t) const { return std::lround(t / t_sim); }

  void validate(const EnvParams& p) const {
    if (!(t_sim > 0.0) || !std::isfinite(t_sim)) throw validation_error("SimConfig: t_sim must be > 0");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw validation_error("SimConfig: t_end must be > 0");
    if (realizations < 1) throw validation_error("SimConfig: realizations must be >= 1");
    for (std::size_t s = 0; s < window_schedule.size(); ++s) {
      const double t = window_schedule[s];
      if (t - p.delta < -1e-12) throw validation_error("SimConfig: window starts before t = 0");
      if (t > t_end + 1e-12) throw validation_error("SimConfig: window ends after t_end");
      if (s > 0 && !(t - window_schedule[s - 1] >= p.delta - 1e-12))
        throw validation_error("SimConfig: windows must be increasing and spaced by >= delta");
    }
  }
};

/// S window end-times starting at `first_end`, spaced by cfg.gap(p).
inline std::vector<double> make_window_schedule(double first_end, int count, const SimConfig& cfg,
                                                const EnvParams& p) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) out.push_back(first_end + s * cfg.gap(p));
  return out;
}

}  // namespace mcest::simulator

#endif  // MCEST_SIMULATOR_CONFIG_HPP
