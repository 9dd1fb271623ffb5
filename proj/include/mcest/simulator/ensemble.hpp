#ifndef MCEST_SIMULATOR_ENSEMBLE_HPP
#define MCEST_SIMULATOR_ENSEMBLE_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/random/poisson_distribution.hpp>

#include "mcest/errors.hpp"
#include "mcest/parallel.hpp"
#include "mcest/simulator/realization.hpp"

namespace mcest::simulator {

/// Empirical mean of Delta N_j(t) + noise over realizations, with standard errors.
struct EnsembleCurve {
  std::vector<double> times;
  std::vector<double> mean_rx1, mean_rx2;
  std::vector<double> se_rx1, se_rx2;
  int realizations = 0;
};

namespace detail {
inline constexpr std::uint64_t curve_noise_stream = 0x63757276ULL;

inline void finish_moments(const std::vector<std::vector<double>>& per_run, std::size_t column,
                           std::vector<double>& mean, std::vector<double>& se) {
  const std::size_t runs = per_run.size();
  const std::size_t width = per_run.front().size() / 2;
  mean.assign(width, 0.0);
  se.assign(width, 0.0);
  for (std::size_t i = 0; i < width; ++i) {
    double m = 0.0;
    for (const auto& row : per_run) m += row[column * width + i];
    m /= static_cast<double>(runs);
    double ss = 0.0;
    for (const auto& row : per_run) {
      const double dv = row[column * width + i] - m;
      ss += dv * dv;
    }
    mean[i] = m;
    se[i] = std::sqrt(ss / static_cast<double>(runs - 1) / static_cast<double>(runs));
  }
}
}  // namespace detail

/// Runs cfg.realizations independent realizations (seeds derived from
/// cfg.seed by index) and averages windowed counts at `times`. Each sample
/// gets its own Poisson(xi) noise draw.
inline EnsembleCurve ensemble_curve(const EnvParams& p, const SimConfig& cfg,
                                    const std::vector<double>& times,
                                    unsigned threads = default_threads()) {
  if (cfg.realizations < 2) throw validation_error("ensemble_curve: needs >= 2 realizations");
  SimConfig run_cfg = cfg;
  run_cfg.window_schedule.clear();
  run_cfg.validate(p);
  for (double t : times)
    if (t > cfg.t_end + 1e-12 || t < 0.0) throw validation_error("ensemble_curve: sample time outside [0, t_end]");

  const auto runs = static_cast<std::size_t>(cfg.realizations);
  const std::size_t width = times.size();
  std::vector<std::vector<double>> per_run(runs);
  parallel_for(runs, threads, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(cfg.seed, r);
    const RealizationRecord rec = run_realization(p, run_cfg, seed);
    Engine noise_rng(derive_seed(seed, detail::curve_noise_stream));
    boost::random::poisson_distribution<std::int64_t, double> noise(p.xi > 0.0 ? p.xi : 1.0);
    std::vector<double> row(2 * width);
    for (std::size_t i = 0; i < width; ++i) {
      double c1 = static_cast<double>(window_absorbed(rec, Receiver::rx1, times[i], p.delta, run_cfg));
      double c2 = static_cast<double>(window_absorbed(rec, Receiver::rx2, times[i], p.delta, run_cfg));
      if (p.xi > 0.0) {
        c1 += static_cast<double>(noise(noise_rng));
        c2 += static_cast<double>(noise(noise_rng));
      }
      row[i] = c1;
      row[width + i] = c2;
    }
    per_run[r] = std::move(row);
  });

  EnsembleCurve out;
  out.times = times;
  out.realizations = cfg.realizations;
  if (width == 0) return out;
  detail::finish_moments(per_run, 0, out.mean_rx1, out.se_rx1);
  detail::finish_moments(per_run, 1, out.mean_rx2, out.se_rx2);
  return out;
}

}  // namespace mcest::simulator

#endif  // MCEST_SIMULATOR_ENSEMBLE_HPP
