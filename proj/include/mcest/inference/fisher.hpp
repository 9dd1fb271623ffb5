#ifndef MCEST_INFERENCE_FISHER_HPP
#define MCEST_INFERENCE_FISHER_HPP

#include <cmath>
#include <cstdint>
#include <sstream>

#include "mcest/channel/cir.hpp"
#include "mcest/errors.hpp"
#include "mcest/inference/gamma.hpp"
#include "mcest/inference/problem.hpp"
#include "mcest/inference/skellam.hpp"
#include "mcest/numerics/bessel.hpp"

namespace mcest::inference {

/// Noisy Poisson means N_j + xi of the two receivers.
inline SkellamModel observation_model(const EnvParams& p) {
  return {channel::asymptotic_signal(Receiver::rx1, p) + p.xi,
          channel::asymptotic_signal(Receiver::rx2, p) + p.xi};
}

/// Ingredients of the per-observation Fisher information of g2 - g1.
struct FisherTerms {
  SkellamModel model;
  double gamma1 = 0.0, gamma2 = 0.0;
  double theta = 0.0;  ///< sum of pmf(n) (I_{n-1}/I_n)^2 over the support
  SupportRange support;
  double per_observation = 0.0;
};

/// sum over the support of pmf(n) (I_{n-1}(z) / I_n(z))^2.
inline double theta_sum(const SkellamModel& m, const SupportRange& r) {
  const double z = m.bessel_arg();
  return skellam_expectation(m, r, [&](std::int64_t n) {
    const double rho = numerics::bessel_ratio(static_cast<int>(n), z);
    return rho * rho;
  });
}

inline FisherTerms fisher_terms(Unknown u, const EnvParams& p, const ThetaSpec& spec = {}) {
  FisherTerms t;
  t.model = observation_model(p);
  t.gamma1 = gamma_deriv(u, Receiver::rx1, p);
  t.gamma2 = gamma_deriv(u, Receiver::rx2, p);
  t.support = skellam_support(t.model, spec);
  t.theta = theta_sum(t.model, t.support);

  const double n1 = t.model.n_hat_1, n2 = t.model.n_hat_2;
  const double g1 = t.gamma1, g2 = t.gamma2;
  const double c = std::sqrt(n2 / n1) * g1 + std::sqrt(n1 / n2) * g2;
  t.per_observation = (3.0 * n2 - n1) / (4.0 * n2 * n2) * g2 * g2 +
                      (3.0 * n1 - n2) / (4.0 * n1 * n1) * g1 * g1 -
                      (n1 + n2) / (2.0 * n1 * n2) * g1 * g2 +
                      (t.theta - (4.0 * n2 * n2 + 3.0 * n2 - n1) / (4.0 * n1 * n2)) * c * c;
  return t;
}

/// Fisher information of S independent differences g2 - g1 about the unknown.
inline double fisher_information(Unknown u, const EnvParams& p, int S, const ThetaSpec& spec = {}) {
  if (S < 1) throw validation_error("fisher_information: S must be >= 1");
  const FisherTerms t = fisher_terms(u, p, spec);
  if (!(t.per_observation > 0.0) || !std::isfinite(t.per_observation)) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "fisher_information: non-positive information " << t.per_observation << " for "
        << name(u) << " (theta=" << t.theta << ", support=[" << t.support.lo << ", " << t.support.hi
        << "], gamma1=" << t.gamma1 << ", gamma2=" << t.gamma2 << ", N1=" << t.model.n_hat_1
        << ", N2=" << t.model.n_hat_2 << ")";
    throw numerical_error(msg.str(), t.per_observation);
  }
  return static_cast<double>(S) * t.per_observation;
}

/// Lower bound 1 / L on the variance of unbiased estimators.
inline double crlb(Unknown u, const EnvParams& p, int S, const ThetaSpec& spec = {}) {
  return 1.0 / fisher_information(u, p, S, spec);
}

/// CRLB divided by the squared true value.
inline double normalized_crlb(Unknown u, const EnvParams& p, int S, const ThetaSpec& spec = {}) {
  const double x = value_of(u, p);
  return crlb(u, p, S, spec) / (x * x);
}

/// d/d(unknown) of ln pmf(n) for one difference observation.
inline double score(std::int64_t n, double gamma1, double gamma2, const SkellamModel& m) {
  const double n1 = m.n_hat_1, n2 = m.n_hat_2;
  const double z = m.bessel_arg();
  const double c = std::sqrt(n2 / n1) * gamma1 + std::sqrt(n1 / n2) * gamma2;
  const double g = static_cast<double>(n);
  const double rho = numerics::bessel_ratio(static_cast<int>(n), z);
  return -gamma1 - gamma2 + 0.5 * g * (gamma2 / n2 - gamma1 / n1) + (rho - g / z) * c;
}

}  // namespace mcest::inference

#endif  // MCEST_INFERENCE_FISHER_HPP
