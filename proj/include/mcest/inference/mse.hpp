#ifndef MCEST_INFERENCE_MSE_HPP
#define MCEST_INFERENCE_MSE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/random/poisson_distribution.hpp>

#include "mcest/errors.hpp"
#include "mcest/inference/estimators.hpp"
#include "mcest/inference/fisher.hpp"
#include "mcest/parallel.hpp"
#include "mcest/simulator/realization.hpp"

namespace mcest::inference {

/// Where trial observations come from.
enum class ObservationMode {
  poisson,    ///< g_j ~ Poisson(N_j + xi), independent across windows
  simulator,  ///< windowed counts of one particle realization per trial
};

inline std::string_view name(ObservationMode m) { return m == ObservationMode::poisson ? "poisson" : "simulator"; }

inline ObservationMode parse_mode(std::string_view s) {
  if (s == "poisson") return ObservationMode::poisson;
  if (s == "simulator") return ObservationMode::simulator;
  throw validation_error("unknown observation mode '" + std::string(s) + "' (expected poisson or simulator)");
}

/// S pairs of Poisson counts with means N_j + xi. Draws alternate g1, g2 per
/// window, so the first S pairs do not depend on how many are requested.
inline ObservationSet sample_poisson_observations(const EnvParams& p, int S, std::uint64_t seed) {
  if (S < 1) throw validation_error("sample_poisson_observations: S must be >= 1");
  const SkellamModel m = observation_model(p);
  simulator::Engine rng(seed);
  boost::random::poisson_distribution<std::int64_t, double> rx1(m.n_hat_1), rx2(m.n_hat_2);
  std::vector<std::int64_t> g1(static_cast<std::size_t>(S)), g2(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) {
    g1[static_cast<std::size_t>(s)] = rx1(rng);
    g2[static_cast<std::size_t>(s)] = rx2(rng);
  }
  return ObservationSet::from_pairs(std::move(g1), std::move(g2));
}

/// Window counts of one particle realization; windows end at `first_end`,
/// then every cfg.gap(p) seconds. t_end is set to the last window end.
inline ObservationSet sample_simulated_observations(const EnvParams& p, simulator::SimConfig cfg, double first_end,
                                                    int S, std::uint64_t seed) {
  if (S < 1) throw validation_error("sample_simulated_observations: S must be >= 1");
  cfg.window_schedule = simulator::make_window_schedule(first_end, S, cfg, p);
  cfg.t_end = cfg.window_schedule.back();
  const auto rec = simulator::run_realization(p, cfg, seed);
  std::vector<std::int64_t> g1, g2;
  for (const auto& w : rec.window_counts) {
    g1.push_back(w[0]);
    g2.push_back(w[1]);
  }
  return ObservationSet::from_pairs(std::move(g1), std::move(g2));
}

struct MseStudySpec {
  Unknown unknown = Unknown::d2;
  EnvParams truth;
  int trials = 1000;
  int S = 1;
  std::vector<Estimator> estimators{Estimator::de, Estimator::ml_rx1, Estimator::ml_rx2};
  ObservationMode mode = ObservationMode::poisson;
  std::uint64_t seed = 1;
  /// Simulator mode only.
  simulator::SimConfig sim;
  double first_window_end = 0.0;
  /// Bracket override; the default is [truth / 4, 4 truth].
  std::optional<std::pair<double, double>> bracket;

  void validate() const {
    truth.validate();
    if (trials < 100) throw validation_error("MseStudySpec: trials must be >= 100");
    if (S < 1) throw validation_error("MseStudySpec: S must be >= 1");
    if (estimators.empty()) throw validation_error("MseStudySpec: no estimators");
    if (mode == ObservationMode::simulator && !(first_window_end >= truth.delta))
      throw validation_error("MseStudySpec: first_window_end must be >= delta in simulator mode");
  }

  EstimationProblem problem() const {
    EstimationProblem prob = default_problem(unknown, truth);
    if (bracket) {
      prob.bracket_lo = bracket->first;
      prob.bracket_hi = bracket->second;
    }
    return prob;
  }
};

/// Normalized squared error statistics of one estimator.
struct EstimatorStats {
  Estimator estimator = Estimator::de;
  double nmse = NAN;     ///< mean of ((x_hat - x) / x)^2 over successful trials
  double nmse_se = NAN;  ///< its Monte Carlo standard error
  double normalized_bias = NAN;
  int successes = 0;
  int failures = 0;
  int clamped = 0;
  /// False when more than 10% of trials failed.
  bool valid = false;
};

struct MseStudyResult {
  std::vector<EstimatorStats> stats;
  int trials = 0;

  const EstimatorStats& of(Estimator e) const {
    for (const auto& s : stats)
      if (s.estimator == e) return s;
    throw validation_error("MseStudyResult: estimator not in study");
  }
};

/// Trial t draws one observation set from seed derive_seed(spec.seed, t) and
/// feeds it to every estimator. Results do not depend on the thread count.
inline MseStudyResult mse_study(const MseStudySpec& spec, unsigned threads = default_threads()) {
  spec.validate();
  const EstimationProblem prob = spec.problem();
  prob.validate();
  const double x_true = value_of(spec.unknown, spec.truth);
  const std::size_t n_est = spec.estimators.size();
  const auto trials = static_cast<std::size_t>(spec.trials);

  // Per trial and estimator: normalized error, or NaN for a failure; clamped flag.
  std::vector<double> err(trials * n_est, NAN);
  std::vector<char> clamped(trials * n_est, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    const std::uint64_t seed = derive_seed(spec.seed, t);
    const ObservationSet obs =
        spec.mode == ObservationMode::poisson
            ? sample_poisson_observations(spec.truth, spec.S, seed)
            : sample_simulated_observations(spec.truth, spec.sim, spec.first_window_end, spec.S, seed);
    for (std::size_t e = 0; e < n_est; ++e) {
      try {
        const Estimate est = run_estimator(spec.estimators[e], prob, obs);
        err[t * n_est + e] = (est.value - x_true) / x_true;
        clamped[t * n_est + e] = est.clamped ? 1 : 0;
      } catch (const numerical_error&) {
        // counted as a failure
      }
    }
  });

  MseStudyResult out;
  out.trials = spec.trials;
  for (std::size_t e = 0; e < n_est; ++e) {
    EstimatorStats s;
    s.estimator = spec.estimators[e];
    double sum_sq = 0.0, sum_q = 0.0, sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const double x = err[t * n_est + e];
      if (std::isnan(x)) { ++s.failures; continue; }
      ++s.successes;
      s.clamped += clamped[t * n_est + e];
      sum += x;
      sum_sq += x * x;
      sum_q += x * x * x * x;
    }
    if (s.successes > 0) {
      const double n = s.successes;
      s.nmse = sum_sq / n;
      s.normalized_bias = sum / n;
      const double var = n > 1 ? std::max(0.0, (sum_q / n - s.nmse * s.nmse) * n / (n - 1)) : 0.0;
      s.nmse_se = std::sqrt(var / n);
    }
    s.valid = s.failures * 10 <= spec.trials;
    out.stats.push_back(s);
  }
  return out;
}

}  // namespace mcest::inference

#endif  // MCEST_INFERENCE_MSE_HPP
