#ifndef MCEST_INFERENCE_ESTIMATORS_HPP
#define MCEST_INFERENCE_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "mcest/channel/cir.hpp"
#include "mcest/errors.hpp"
#include "mcest/inference/observations.hpp"
#include "mcest/inference/problem.hpp"
#include "mcest/numerics/roots.hpp"

namespace mcest::inference {

enum class Estimator { de, ml_rx1, ml_rx2 };

inline std::string_view name(Estimator e) {
  switch (e) {
    case Estimator::de: return "de";
    case Estimator::ml_rx1: return "rx1";
    case Estimator::ml_rx2: return "rx2";
  }
  return "?";
}

inline Estimator parse_estimator(std::string_view s) {
  for (Estimator e : {Estimator::de, Estimator::ml_rx1, Estimator::ml_rx2})
    if (name(e) == s) return e;
  throw validation_error("unknown estimator '" + std::string(s) + "' (expected de, rx1 or rx2)");
}

/// The moment equation had no solution inside the physical range.
class estimation_failure : public no_root {
 public:
  using no_root::no_root;
};

struct Estimate {
  double value = 0.0;
  /// Sample mean unreachable: value is the bracket end closest to it.
  bool clamped = false;
  int iterations = 0;
  double bracket_lo = 0.0, bracket_hi = 0.0;  ///< bracket after expansion
};

namespace detail {

// Noise-free model mean at x; xi is zeroed so estimators cannot depend on it.
inline double model_count(const EstimationProblem& prob, Receiver j, double x) {
  EnvParams p = prob.at(x);
  p.xi = 0.0;
  return channel::asymptotic_signal(j, p);
}

template <class F>
Estimate solve_moment(const EstimationProblem& prob, F&& f, bool clamp, const char* who) {
  EstimationProblem checked = prob;
  checked.known.xi = 0.0;
  checked.validate();
  const auto [lo, hi] =
      numerics::expand_bracket(f, prob.bracket_lo, prob.bracket_hi, physical_limits(prob.unknown, prob.known));
  Estimate out;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  numerics::RootSpec spec;
  spec.bracket_lo = lo;
  spec.bracket_hi = hi;
  spec.x_tol = 1e-12 * std::max(std::abs(lo), std::abs(hi));
  spec.f_tol = 1e-13;
  try {
    const auto r = numerics::find_root(f, spec);
    out.value = r.root;
    out.iterations = r.iterations;
  } catch (const no_root& e) {
    if (!clamp)
      throw estimation_failure(std::string(who) + ": no root of the moment equation in [" +
                                   std::to_string(lo) + ", " + std::to_string(hi) + "]",
                               e.best());
    out.value = e.best();
    out.clamped = true;
  }
  return out;
}

}  // namespace detail

/// Difference estimate: the value at which N_2 - N_1 equals the sample mean
/// of g2 - g1. Additive noise common to both receivers cancels.
inline Estimate estimate_de(const EstimationProblem& prob, const ObservationSet& obs) {
  const double target = sample_mean(obs.g_diff());
  auto f = [&](double x) {
    return detail::model_count(prob, Receiver::rx2, x) - detail::model_count(prob, Receiver::rx1, x) - target;
  };
  return detail::solve_moment(prob, f, false, "estimate_de");
}

/// Per-receiver ML estimate that ignores the noise: N_j equals the sample
/// mean of g_j. Unreachable means are clamped to the nearer bracket end.
inline Estimate estimate_ml_rx(Receiver j, const EstimationProblem& prob, const std::vector<std::int64_t>& g_j) {
  const double target = sample_mean(g_j);
  auto f = [&](double x) { return detail::model_count(prob, j, x) - target; };
  return detail::solve_moment(prob, f, true, "estimate_ml_rx");
}

inline Estimate run_estimator(Estimator e, const EstimationProblem& prob, const ObservationSet& obs) {
  switch (e) {
    case Estimator::de: return estimate_de(prob, obs);
    case Estimator::ml_rx1: return estimate_ml_rx(Receiver::rx1, prob, obs.counts(Receiver::rx1));
    case Estimator::ml_rx2: return estimate_ml_rx(Receiver::rx2, prob, obs.counts(Receiver::rx2));
  }
  throw validation_error("run_estimator: bad estimator");
}

}  // namespace mcest::inference

#endif  // MCEST_INFERENCE_ESTIMATORS_HPP
