#ifndef MCEST_SIMULATOR_DYNAMICS_HPP
#define MCEST_SIMULATOR_DYNAMICS_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "mcest/simulator/config.hpp"

namespace mcest::simulator {

using Engine = std::mt19937_64;

struct Particle {
  double position = 0.0;
  bool alive = true;
  /// Full steps left before degradation; -1 means never (k = 0).
  std::int64_t steps_to_decay = -1;
  /// Steps still covered by the last multi-step move.
  std::int64_t idle_steps = 0;
};

/// Events during one step.
struct StepCounts {
  std::int64_t absorbed_rx1 = 0;
  std::int64_t absorbed_rx2 = 0;
  std::int64_t degraded = 0;

  StepCounts& operator+=(const StepCounts& o) {
    absorbed_rx1 += o.absorbed_rx1;
    absorbed_rx2 += o.absorbed_rx2;
    degraded += o.degraded;
    return *this;
  }
};

namespace detail {

// A leap of m steps needs the nearest boundary beyond m|v|dt + z sigma sqrt(m);
// the chance of touching it during the leap is then < 2 Phi(-z) ~ 1e-15.
inline constexpr double leap_sigmas = 8.0;

// Beyond this exponent the bridge crossing probability is < 4e-18.
inline constexpr double bridge_cutoff = 40.0;

// Probability that a Brownian bridge between x0 and x1 (both inside) touched
// the boundary at distance gap0, gap1 from the endpoints.
inline double bridge_crossing(double gap0, double gap1, double D, double dt) {
  const double expo = gap0 * gap1 / (D * dt);
  return expo > bridge_cutoff ? 0.0 : std::exp(-expo);
}

// Per-step constants for one step length.
struct Kernel {
  double dt, drift, sigma, lo, hi, diffusion;
  bool crossing;
  double near;  // a gap beyond this at both ends cannot register a crossing

  Kernel(const EnvParams& p, double step, bool crossing_correction)
      : dt(step), drift(p.v * step), sigma(std::sqrt(2.0 * p.diffusion * step)), lo(-p.d1), hi(p.d2),
        diffusion(p.diffusion), crossing(crossing_correction && p.diffusion > 0.0),
        near(std::sqrt(bridge_cutoff * p.diffusion * step)) {}
};

// Largest number of steps (<= cap) a particle at x may cover in one move.
inline std::int64_t leap_length(double x, const Kernel& kn, std::int64_t cap) {
  if (cap <= 1 || kn.sigma <= 0.0) return 1;
  const double gap = std::min(x - kn.lo, kn.hi - x);
  const double zs = leap_sigmas * kn.sigma;
  const double a = std::abs(kn.drift);
  // Largest sqrt(m) with a m + zs sqrt(m) <= gap.
  const double r = a > 0.0 ? 2.0 * gap / (zs + std::sqrt(zs * zs + 4.0 * a * gap)) : gap / zs;
  const double m = std::floor(r * r);
  if (m <= 1.0) return 1;
  return m >= static_cast<double>(cap) ? cap : static_cast<std::int64_t>(m);
}

// Move one particle by one kernel step, then resolve absorption.
// Returns 1 / 2 for absorption at RX1 / RX2, 0 otherwise.
inline int move_and_absorb(Particle& q, const Kernel& kn, Engine& rng) {
  boost::random::normal_distribution<double> normal;
  const double x0 = q.position;
  const double x1 = x0 + kn.drift + kn.sigma * normal(rng);
  q.position = x1;
  if (x1 <= kn.lo) { q.alive = false; return 1; }
  if (x1 >= kn.hi) { q.alive = false; return 2; }
  if (kn.crossing) {
    const double g0 = x0 - kn.lo, g1 = x1 - kn.lo;
    if (g0 < kn.near || g1 < kn.near) {
      const double c = bridge_crossing(g0, g1, kn.diffusion, kn.dt);
      if (c > 0.0 && boost::random::uniform_01<double>()(rng) < c) { q.alive = false; return 1; }
    }
    const double h0 = kn.hi - x0, h1 = kn.hi - x1;
    if (h0 < kn.near || h1 < kn.near) {
      const double c = bridge_crossing(h0, h1, kn.diffusion, kn.dt);
      if (c > 0.0 && boost::random::uniform_01<double>()(rng) < c) { q.alive = false; return 2; }
    }
  }
  return 0;
}

inline void tally(StepCounts& c, int event) {
  if (event == 1) ++c.absorbed_rx1;
  else if (event == 2) ++c.absorbed_rx2;
  else if (event == 3) ++c.degraded;
}

}  // namespace detail

/// One time step for every alive particle: x += v dt + sqrt(2 D dt) Z, then
/// absorption at x <= -d1 (RX1) or x >= d2 (RX2), then degradation of
/// survivors. Each particle carries a geometric countdown of full steps drawn
/// at release, so a survivor degrades in any given step with probability
/// 1 - exp(-k t_sim), independently of the past. Removed particles are erased.
///
/// `steps_left` (this one included) allows particles far from both
/// receivers to cover several steps with one Gaussian move and sit idle for
/// the rest; 1 gives plain single steps.
inline StepCounts step(std::vector<Particle>& particles, const EnvParams& p, const SimConfig& cfg,
                       Engine& rng, std::int64_t steps_left = 1) {
  StepCounts counts;
  const detail::Kernel kn(p, cfg.t_sim, cfg.crossing_correction);
  boost::random::normal_distribution<double> normal;
  for (auto& q : particles) {
    if (!q.alive) continue;
    if (q.idle_steps > 0) {
      --q.idle_steps;
      continue;
    }
    std::int64_t m = detail::leap_length(q.position, kn, steps_left);
    if (q.steps_to_decay > 0 && m > q.steps_to_decay) m = q.steps_to_decay;
    int event;
    if (m == 1) {
      event = detail::move_and_absorb(q, kn, rng);
    } else {
      const double md = static_cast<double>(m);
      q.position += md * kn.drift + std::sqrt(md) * kn.sigma * normal(rng);
      event = q.position <= kn.lo ? 1 : q.position >= kn.hi ? 2 : 0;
      if (event != 0) q.alive = false;
      q.idle_steps = m - 1;
    }
    if (event != 0) {
      detail::tally(counts, event);
    } else if (q.steps_to_decay >= 0 && (q.steps_to_decay -= m) == 0) {
      q.alive = false;
      ++counts.degraded;
    }
  }
  std::erase_if(particles, [](const Particle& q) { return !q.alive; });
  return counts;
}

struct EmitResult {
  std::int64_t emitted = 0;
  StepCounts counts;  ///< events during the partial first step
};

/// Releases Poisson(mu t_sim) molecules at the origin. Each is advanced for a
/// residual time u ~ U(0, t_sim), so release instants are continuous within
/// the step; it degrades at the end of that partial step with probability
/// 1 - exp(-k u), else gets a Geometric(1 - exp(-k t_sim)) countdown of full
/// steps. Survivors are appended to `particles`.
inline EmitResult emit(std::vector<Particle>& particles, const EnvParams& p, const SimConfig& cfg,
                       Engine& rng) {
  EmitResult out;
  if (p.mu <= 0.0) return out;
  boost::random::poisson_distribution<std::int64_t, double> poisson(p.mu * cfg.t_sim);
  boost::random::uniform_01<double> uniform;
  const double full_prob = -std::expm1(-p.k * cfg.t_sim);
  out.emitted = poisson(rng);
  for (std::int64_t n = 0; n < out.emitted; ++n) {
    const double residual = cfg.t_sim * uniform(rng);
    Particle q;
    if (residual > 0.0) {
      const int event = detail::move_and_absorb(q, detail::Kernel(p, residual, cfg.crossing_correction), rng);
      if (event != 0) {
        detail::tally(out.counts, event);
        continue;
      }
    }
    if (p.k > 0.0) {
      if (uniform(rng) < -std::expm1(-p.k * residual)) {
        ++out.counts.degraded;
        continue;
      }
      if (full_prob >= 1.0) {
        q.steps_to_decay = 1;
      } else {
        // Inversion: smallest n >= 1 with 1 - (1 - p)^n >= u.
        const double u = 1.0 - uniform(rng);  // in (0, 1]
        const double steps = std::ceil(std::log(u) / std::log1p(-full_prob));
        q.steps_to_decay = steps < 1.0 ? 1 : steps > 9e18 ? -1 : static_cast<std::int64_t>(steps);
      }
    }
    particles.push_back(q);
  }
  return out;
}

}  // namespace mcest::simulator

#endif  // MCEST_SIMULATOR_DYNAMICS_HPP
