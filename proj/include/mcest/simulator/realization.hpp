#ifndef MCEST_SIMULATOR_REALIZATION_HPP
#define MCEST_SIMULATOR_REALIZATION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/random/poisson_distribution.hpp>

#include "mcest/channel/params.hpp"
#include "mcest/parallel.hpp"
#include "mcest/simulator/config.hpp"
#include "mcest/simulator/dynamics.hpp"

namespace mcest::simulator {

using channel::Receiver;

struct RealizationRecord {
  /// Cumulative absorptions at the end of each step; index 0 is t = 0.
  std::vector<std::int64_t> absorbed_rx1;
  std::vector<std::int64_t> absorbed_rx2;
  /// Per scheduled window: {RX1, RX2} counts including Poisson(xi) noise.
  std::vector<std::array<std::int64_t, 2>> window_counts;

  std::int64_t emitted = 0;
  std::int64_t degraded = 0;
  std::int64_t alive_at_end = 0;

  const std::vector<std::int64_t>& cumulative(Receiver j) const {
    return j == Receiver::rx1 ? absorbed_rx1 : absorbed_rx2;
  }
};

/// Noise-free count absorbed by RX j in [t - delta, t].
inline std::int64_t window_absorbed(const RealizationRecord& r, Receiver j, double t, double delta,
                                    const SimConfig& cfg) {
  const auto& c = r.cumulative(j);
  const long last = static_cast<long>(c.size()) - 1;
  const long hi = std::clamp(cfg.step_index(t), 0L, last);
  const long lo = std::clamp(cfg.step_index(t - delta), 0L, last);
  return c[static_cast<std::size_t>(hi)] - c[static_cast<std::size_t>(lo)];
}

namespace detail {
inline constexpr std::uint64_t noise_stream = 0x6e6f697365ULL;
}

/// One full realization, deterministic in `seed`. Particle motion and noise
/// use separate streams derived from it.
inline RealizationRecord run_realization(const EnvParams& p, const SimConfig& cfg, std::uint64_t seed) {
  p.validate_for_simulation();
  cfg.validate(p);
  Engine rng(derive_seed(seed, 0));
  Engine noise_rng(derive_seed(seed, detail::noise_stream));

  const long n_steps = cfg.steps();
  RealizationRecord rec;
  rec.absorbed_rx1.assign(static_cast<std::size_t>(n_steps) + 1, 0);
  rec.absorbed_rx2.assign(static_cast<std::size_t>(n_steps) + 1, 0);

  std::vector<Particle> particles;
  particles.reserve(static_cast<std::size_t>(4.0 * p.mu / std::max(p.k, 0.1)) + 16);
  StepCounts total;
  for (long n = 1; n <= n_steps; ++n) {
    total += step(particles, p, cfg, rng, cfg.leap_far_particles ? n_steps - n + 1 : 1);
    const EmitResult fresh = emit(particles, p, cfg, rng);
    rec.emitted += fresh.emitted;
    total += fresh.counts;
    rec.absorbed_rx1[static_cast<std::size_t>(n)] = total.absorbed_rx1;
    rec.absorbed_rx2[static_cast<std::size_t>(n)] = total.absorbed_rx2;
  }
  rec.degraded = total.degraded;
  rec.alive_at_end = static_cast<std::int64_t>(particles.size());

  boost::random::poisson_distribution<std::int64_t, double> noise(p.xi > 0.0 ? p.xi : 1.0);
  rec.window_counts.reserve(cfg.window_schedule.size());
  for (double t : cfg.window_schedule) {
    std::array<std::int64_t, 2> w{window_absorbed(rec, Receiver::rx1, t, p.delta, cfg),
                                  window_absorbed(rec, Receiver::rx2, t, p.delta, cfg)};
    if (p.xi > 0.0) {
      w[0] += noise(noise_rng);
      w[1] += noise(noise_rng);
    }
    rec.window_counts.push_back(w);
  }
  return rec;
}

}  // namespace mcest::simulator

#endif  // MCEST_SIMULATOR_REALIZATION_HPP
