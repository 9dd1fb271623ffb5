#ifndef MCEST_CHANNEL_CIR_HPP
#define MCEST_CHANNEL_CIR_HPP

#include <cmath>
#include <map>
#include <string>

#include "mcest/channel/params.hpp"
#include "mcest/errors.hpp"
#include "mcest/numerics/erfcx.hpp"
#include "mcest/numerics/quadrature.hpp"

// Channel impulse response of the two-receiver line under continuous emission.
//
// The cumulative count N_j(t) is an image series over i of groups of four
// R_i(x, t, a) terms. Every exp(+-x kappa) * erfc(.) product is evaluated in
// erfcx form, so the large image distances used for i > 0 never overflow.

namespace mcest::channel {

namespace detail {

/// The four exponential-erfc quantities R_i depends on, at one (x, t).
struct ImageIntegrals {
  double alpha_omega = 0.0;      ///< exp(x kappa) * int_0^t beta(u) du
  double alphahat_nu = 0.0;      ///< exp(-x kappa) * int_0^t betahat(u) du
  double alpha_beta = 0.0;       ///< exp(x kappa) * beta(t)
  double alphahat_betahat = 0.0; ///< exp(-x kappa) * betahat(t)
};

class ImageTerms {
 public:
  ImageTerms(const EnvParams& p, const numerics::QuadratureSpec& quad)
      : p_(p), quad_(quad), kappa_(p.kappa()), k_eff_(p.effective_k()) {}

  double kappa() const { return kappa_; }

  // exp(x kappa) erfc(a + b): exponent x kappa - (a+b)^2 = -a^2 - b^2.
  double alpha_beta(double x, double u) const {
    const double a = x / std::sqrt(4.0 * p_.diffusion * u);
    const double b = std::sqrt(k_eff_ * u);
    return std::exp(-a * a - b * b) * numerics::erfcx(a + b);
  }

  // exp(-x kappa) erfc(a - b).
  double alphahat_betahat(double x, double u) const {
    const double a = x / std::sqrt(4.0 * p_.diffusion * u);
    const double b = std::sqrt(k_eff_ * u);
    return numerics::exp_times_erfc(-x * kappa_, a - b, -a * a - b * b);
  }

  const ImageIntegrals& at(double x, double t) {
    auto it = cache_.find(x);
    if (it != cache_.end()) return it->second;
    ImageIntegrals r;
    r.alpha_omega =
        numerics::integrate([&](double u) { return alpha_beta(x, u); }, 0.0, t, quad_).value;
    r.alphahat_nu =
        numerics::integrate([&](double u) { return alphahat_betahat(x, u); }, 0.0, t, quad_).value;
    r.alpha_beta = alpha_beta(x, t);
    r.alphahat_betahat = alphahat_betahat(x, t);
    return cache_.emplace(x, r).first->second;
  }

  // R_i(x, t, a) without its (i + 1) t term, which cancels inside each group.
  double r_without_linear(int i, double x, double t, int a) {
    const ImageIntegrals& g = at(x, t);
    const double theta = p_.separation() * (i + 1.0) * (i + a);
    const double root = std::sqrt(p_.diffusion * p_.v * p_.v + 4.0 * p_.k * p_.diffusion);
    return 0.5 * theta * kappa_ * (g.alpha_omega - g.alphahat_nu) -
           0.5 * (i + 1.0) * (g.alpha_omega + g.alphahat_nu) -
           theta / root * (g.alphahat_betahat - g.alpha_beta);
  }

 private:
  EnvParams p_;
  numerics::QuadratureSpec quad_;
  double kappa_;
  double k_eff_;
  std::map<double, ImageIntegrals> cache_;  // keyed on x; t and kappa fixed per instance
};

inline void check_receiver_time(double t, const char* who) {
  if (!(t > 0.0) || !std::isfinite(t)) throw domain_error(std::string(who) + ": t must be > 0");
}

}  // namespace detail

/// R_i(x, t, a) for a in {0, 2}.
inline double term_R(int i, double x, double t, int a, const EnvParams& p,
                     const numerics::QuadratureSpec& quad = SeriesSpec{}.quad) {
  detail::check_receiver_time(t, "term_R");
  if (!(x > 0.0)) throw domain_error("term_R: x must be > 0");
  if (a != 0 && a != 2) throw domain_error("term_R: a must be 0 or 2");
  if (i < 0) throw domain_error("term_R: i must be >= 0");
  detail::ImageTerms terms(p, quad);
  return terms.r_without_linear(i, x, t, a) + (i + 1.0) * t;
}

/// Result of a truncated series evaluation.
struct SeriesValue {
  double value = 0.0;
  int terms = 0;
};

/// Expected number of molecules absorbed by receiver j up to time t.
inline SeriesValue expected_absorbed_detail(Receiver j, double t, const EnvParams& p,
                                            const SeriesSpec& s = {}) {
  p.validate();
  s.validate();
  detail::check_receiver_time(t, "expected_absorbed");
  const double d = p.separation();
  const double dj = p.distance(j);
  const double prefactor = p.mu * std::exp(EnvParams::flow_sign(j) * dj * p.v / (2.0 * p.diffusion));
  detail::ImageTerms terms(p, s.quad);
  double sum = 0.0;
  int small_in_a_row = 0;
  for (int i = 0; i < s.max_terms; ++i) {
    const double group = terms.r_without_linear(i, 2.0 * (i + 1) * d + dj, t, 2) -
                         terms.r_without_linear(i, 2.0 * (i + 2) * d - dj, t, 2) -
                         terms.r_without_linear(i, 2.0 * i * d + dj, t, 0) +
                         terms.r_without_linear(i, 2.0 * (i + 1) * d - dj, t, 0);
    sum += group;
    small_in_a_row = std::abs(group) <= s.rel_term_tol * std::abs(sum) ? small_in_a_row + 1 : 0;
    if (small_in_a_row >= 2) {
      const double value = prefactor * sum;
      return {value < 0.0 ? 0.0 : value, i + 1};
    }
  }
  throw non_convergence("expected_absorbed: series truncation not reached", prefactor * sum,
                        s.max_terms);
}

inline double expected_absorbed(Receiver j, double t, const EnvParams& p, const SeriesSpec& s = {}) {
  return expected_absorbed_detail(j, t, p, s).value;
}

/// Expected count in the window [t - delta, t].
inline double received_signal(Receiver j, double t, const EnvParams& p, const SeriesSpec& s = {}) {
  if (!(t > p.delta)) throw domain_error("received_signal: requires t > delta");
  const double diff = expected_absorbed(j, t, p, s) - expected_absorbed(j, t - p.delta, p, s);
  return diff < 0.0 ? 0.0 : diff;
}

/// Windowed count in the long-time limit:
/// mu delta e^{+-d_j v/2D} [e^{-d_j kappa} - e^{(d_j - 2d) kappa}] / [1 - e^{-2 d kappa}].
inline double asymptotic_signal(Receiver j, const EnvParams& p) {
  p.validate();
  const double kappa = p.kappa();
  const double dj = p.distance(j);
  const double other = p.separation() - dj;
  const double log_part = EnvParams::flow_sign(j) * dj * p.v / (2.0 * p.diffusion) - dj * kappa;
  return p.mu * p.delta * std::exp(log_part) * std::expm1(-2.0 * other * kappa) /
         std::expm1(-2.0 * p.separation() * kappa);
}

}  // namespace mcest::channel

#endif  // MCEST_CHANNEL_CIR_HPP
