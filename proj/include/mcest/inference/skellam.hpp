#ifndef MCEST_INFERENCE_SKELLAM_HPP
#define MCEST_INFERENCE_SKELLAM_HPP

#include <cmath>
#include <cstdint>
#include <string>

#include "mcest/errors.hpp"
#include "mcest/numerics/bessel.hpp"

namespace mcest::inference {

/// Difference g2 - g1 of independent Poisson counts with means n_hat_2, n_hat_1.
struct SkellamModel {
  double n_hat_1 = 1.0;
  double n_hat_2 = 1.0;

  void validate() const {
    if (!(n_hat_1 > 0.0) || !std::isfinite(n_hat_1) || !(n_hat_2 > 0.0) || !std::isfinite(n_hat_2))
      throw validation_error("SkellamModel: both means must be positive and finite");
  }
  double mean() const { return n_hat_2 - n_hat_1; }
  double variance() const { return n_hat_1 + n_hat_2; }
  /// Bessel argument 2 sqrt(n1 n2).
  double bessel_arg() const { return 2.0 * std::sqrt(n_hat_1 * n_hat_2); }
};

/// Level-set truncation of the Skellam support: keep n with pmf(n) >= threshold.
///
/// The default is far below the 1e-3 used in the original derivation: the
/// Fisher bracket subtracts two nearly equal terms, and at 1e-3 the truncated
/// sum drives it negative at means of a few tens to hundreds.
struct ThetaSpec {
  double pmf_threshold = 1e-14;

  void validate() const {
    if (!(pmf_threshold > 0.0 && pmf_threshold < 1.0))
      throw validation_error("ThetaSpec: pmf_threshold must lie in (0, 1)");
  }
};

inline double skellam_log_pmf(std::int64_t n, const SkellamModel& m) {
  m.validate();
  const double x = m.bessel_arg();
  return -(m.n_hat_1 + m.n_hat_2) + 0.5 * static_cast<double>(n) * std::log(m.n_hat_2 / m.n_hat_1) +
         numerics::log_bessel_i(static_cast<int>(n), x);
}

/// exp(-(n1+n2)) (n2/n1)^{n/2} I_n(2 sqrt(n1 n2)), computed in log space.
inline double skellam_pmf(std::int64_t n, const SkellamModel& m) { return std::exp(skellam_log_pmf(n, m)); }

/// Inclusive integer range [lo, hi].
struct SupportRange {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
  std::int64_t size() const { return hi - lo + 1; }
};

/// Contiguous range {n : pmf(n) >= threshold}. The pmf is log-concave, so the
/// set is an interval around the mode; we climb to the mode from round(mean)
/// and walk outwards.
inline SupportRange skellam_support(const SkellamModel& m, const ThetaSpec& spec = {}) {
  m.validate();
  spec.validate();
  const double log_thr = std::log(spec.pmf_threshold);
  std::int64_t mode = std::llround(m.mean());
  double at = skellam_log_pmf(mode, m);
  for (;;) {
    const double up = skellam_log_pmf(mode + 1, m);
    const double down = skellam_log_pmf(mode - 1, m);
    if (up > at) { ++mode; at = up; }
    else if (down > at) { --mode; at = down; }
    else break;
  }
  if (at < log_thr)
    throw numerical_error("skellam_support: no value of the pmf reaches the threshold " +
                              std::to_string(spec.pmf_threshold),
                          std::exp(at));
  SupportRange r{mode, mode};
  while (skellam_log_pmf(r.lo - 1, m) >= log_thr) --r.lo;
  while (skellam_log_pmf(r.hi + 1, m) >= log_thr) ++r.hi;
  return r;
}

/// Sum of f(n) pmf(n) over a range.
template <class F>
double skellam_expectation(const SkellamModel& m, const SupportRange& r, F&& f) {
  double s = 0.0;
  for (std::int64_t n = r.lo; n <= r.hi; ++n) s += skellam_pmf(n, m) * f(n);
  return s;
}

}  // namespace mcest::inference

#endif  // MCEST_INFERENCE_SKELLAM_HPP
