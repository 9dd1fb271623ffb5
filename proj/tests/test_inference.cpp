#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mcest/inference.hpp"
#include "mcest/numerics.hpp"

using namespace mcest;
using namespace mcest::inference;
using channel::asymptotic_signal;
using channel::Receiver;

namespace {

const EnvParams ref{};

void expect_rel(double got, double want, double tol) {
  EXPECT_LE(std::abs(got - want), tol * std::abs(want)) << "got " << got << " want " << want;
}

EnvParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(8.0, 40.0), vel(0.5, 12.0), diff(30.0, 150.0), k(0.1, 2.0),
      mu(200.0, 3000.0), xi(0.0, 20.0);
  EnvParams p;
  p.d1 = dist(rng);
  p.d2 = dist(rng);
  p.v = vel(rng);
  p.diffusion = diff(rng);
  p.k = k(rng);
  p.mu = mu(rng);
  p.xi = xi(rng);
  return p;
}

double model_count(Unknown u, Receiver j, const EnvParams& p, double x) {
  const EnvParams q = with_value(u, p, x);
  return asymptotic_signal(j, q) + q.xi;
}

}  // namespace

TEST(Skellam, PmfReferenceAndSymmetry) {
  expect_rel(skellam_pmf(0, {1.0, 1.0}), 0.30850832255367103953, 1e-13);
  for (double lam : {0.3, 4.0, 150.0})
    for (int n = 0; n < 40; ++n) expect_rel(skellam_pmf(n, {lam, lam}), skellam_pmf(-n, {lam, lam}), 1e-12);
  // Difference of Poissons by direct convolution.
  const SkellamModel m{2.5, 4.0};
  for (int n = -6; n <= 9; ++n) {
    double direct = 0.0;
    for (int a = 0; a < 200; ++a) {
      const int b = a + n;
      if (b < 0) continue;
      direct += std::exp(-m.n_hat_1 + a * std::log(m.n_hat_1) - std::lgamma(a + 1.0) - m.n_hat_2 +
                         b * std::log(m.n_hat_2) - std::lgamma(b + 1.0));
    }
    expect_rel(skellam_pmf(n, m), direct, 1e-12);
  }
  EXPECT_THROW(skellam_pmf(0, {0.0, 1.0}), validation_error);
}

TEST(Skellam, NormalizationWindow) {
  for (const SkellamModel m : {SkellamModel{1.0, 1.0}, SkellamModel{27.12, 122.93}, SkellamModel{37.1, 132.9},
                               SkellamModel{300.0, 40.0}}) {
    const double half = 12.0 * std::sqrt(m.variance());
    const SupportRange r{static_cast<std::int64_t>(std::floor(m.mean() - half)),
                         static_cast<std::int64_t>(std::ceil(m.mean() + half))};
    const double s = skellam_expectation(m, r, [](std::int64_t) { return 1.0; });
    EXPECT_GE(s, 1.0 - 1e-9);
    EXPECT_LE(s, 1.0 + 1e-12);
  }
}

TEST(Skellam, SupportProperties) {
  const auto sym = skellam_support({1.0, 1.0}, {1e-3});
  EXPECT_EQ(sym.lo, -sym.hi);
  const SkellamModel m = observation_model(ref);
  std::int64_t prev_lo = 0, prev_hi = -1;
  for (double thr : {1e-2, 1e-3, 1e-6, 1e-10, 1e-14}) {
    const auto r = skellam_support(m, {thr});
    EXPECT_LE(r.lo, std::llround(m.mean()));
    EXPECT_GE(r.hi, std::llround(m.mean()));
    EXPECT_GE(skellam_pmf(r.lo, m), thr);
    EXPECT_GE(skellam_pmf(r.hi, m), thr);
    EXPECT_LT(skellam_pmf(r.lo - 1, m), thr);
    EXPECT_LT(skellam_pmf(r.hi + 1, m), thr);
    if (prev_hi >= prev_lo) {
      EXPECT_LE(r.lo, prev_lo);
      EXPECT_GE(r.hi, prev_hi);
    }
    prev_lo = r.lo;
    prev_hi = r.hi;
    // Mass inside the level set versus the count of points it excludes.
    const double mass = skellam_expectation(m, r, [](std::int64_t) { return 1.0; });
    EXPECT_GE(mass, 1.0 - 2.0 * thr * static_cast<double>(r.size()));
  }
  // Reference supports at the ref's channel.
  const auto r3 = skellam_support(m, {1e-3});
  EXPECT_EQ(r3.lo, 64);
  EXPECT_EQ(r3.hi, 128);
  EXPECT_NEAR(skellam_expectation(m, r3, [](std::int64_t) { return 1.0; }), 0.992013474376434, 1e-12);
  EXPECT_THROW(skellam_support({1.0, 1.0}, {0.9}), numerical_error);
  EXPECT_THROW(skellam_support({1.0, 1.0}, {0.0}), validation_error);
}

TEST(Skellam, AppendixIdentitiesAtDefaultThreshold) {
  std::mt19937_64 rng(11);
  for (int draw = 0; draw < 10; ++draw) {
    const SkellamModel m = observation_model(draw == 0 ? ref : random_params(rng));
    const auto r = skellam_support(m);
    const double n1 = m.n_hat_1, n2 = m.n_hat_2, z = m.bessel_arg();
    auto E = [&](auto f) { return skellam_expectation(m, r, f); };
    auto ratio = [&](std::int64_t n) { return numerics::bessel_ratio(static_cast<int>(n), z); };
    expect_rel(E([](std::int64_t n) { return double(n); }), n2 - n1, 1e-9);
    expect_rel(E([](std::int64_t n) { return double(n) * double(n); }), (n2 - n1) * (n2 - n1) + n1 + n2, 1e-9);
    expect_rel(E(ratio), std::sqrt(n2 / n1), 1e-9);
    expect_rel(E([&](std::int64_t n) { return double(n) * ratio(n); }), std::sqrt(n2 / n1) * (n2 - n1 + 1.0), 1e-9);
    expect_rel(E([&](std::int64_t n) { return ratio(n) * ratio(n - 1); }), n2 / n1, 1e-9);
    expect_rel(E([&](std::int64_t n) { return 1.0 / (ratio(n + 1) * ratio(n + 2)); }), n1 / n2, 1e-9);
  }
}

TEST(Gamma, MatchesFiniteDifferences) {
  std::mt19937_64 rng(12);
  for (int draw = 0; draw < 20; ++draw) {
    const EnvParams p = random_params(rng);
    for (Unknown u : all_unknowns)
      for (Receiver j : {Receiver::rx1, Receiver::rx2}) {
        const double x = value_of(u, p);
        const double fd =
            numerics::central_diff([&](double y) { return model_count(u, j, p, y); }, x, numerics::default_diff_step(x));
        expect_rel(gamma_deriv(u, j, p), fd, 1e-6);
      }
  }
}

TEST(Gamma, ReferenceValuesAndSigns) {
  const struct { Unknown u; double g1, g2; } cases[] = {
      {Unknown::d2, 4.01422103502, -8.90619572072},
      {Unknown::mu, 0.0271201071765, 0.122929427137},
      {Unknown::v, -4.58636904089, 10.1755981968},
      {Unknown::k, -30.9855433606, -140.450591514},
  };
  for (const auto& c : cases) {
    expect_rel(gamma_deriv(c.u, Receiver::rx1, ref), c.g1, 1e-10);
    expect_rel(gamma_deriv(c.u, Receiver::rx2, ref), c.g2, 1e-10);
  }
  for (Receiver j : {Receiver::rx1, Receiver::rx2})
    EXPECT_DOUBLE_EQ(gamma_deriv(Unknown::mu, j, ref), asymptotic_signal(j, ref) / ref.mu);
  EXPECT_LT(gamma_deriv(Unknown::d2, Receiver::rx2, ref), 0.0);
  EXPECT_LT(gamma_deriv(Unknown::k, Receiver::rx1, ref), 0.0);
  EXPECT_LT(gamma_deriv(Unknown::k, Receiver::rx2, ref), 0.0);
}

TEST(Fisher, ScoreIsDerivativeOfLogPmf) {
  for (Unknown u : all_unknowns) {
    const auto t = fisher_terms(u, ref);
    const double x = value_of(u, ref);
    for (std::int64_t n : {60, 96, 130}) {
      auto lp = [&](double y) { return skellam_log_pmf(n, observation_model(with_value(u, ref, y))); };
      expect_rel(score(n, t.gamma1, t.gamma2, t.model), numerics::central_diff(lp, x, 1e-6 * x), 1e-5);
    }
  }
}

TEST(Fisher, EqualsExpectedSquaredScoreAndIsRegular) {
  std::mt19937_64 rng(13);
  for (int draw = 0; draw < 5; ++draw) {
    const EnvParams p = draw == 0 ? ref : random_params(rng);
    for (Unknown u : all_unknowns) {
      const auto t = fisher_terms(u, p);
      const double sq = skellam_expectation(t.model, t.support, [&](std::int64_t n) {
        const double s = score(n, t.gamma1, t.gamma2, t.model);
        return s * s;
      });
      const double mean = skellam_expectation(t.model, t.support,
                                              [&](std::int64_t n) { return score(n, t.gamma1, t.gamma2, t.model); });
      expect_rel(t.per_observation, sq, 1e-8);
      EXPECT_LT(std::abs(mean), 1e-8) << name(u);
    }
  }
}

TEST(Fisher, ReferenceValues) {
  const struct { Unknown u; double per_obs, crlb_norm; } cases[] = {
      {Unknown::d2, 1.11279901004, 0.00224658718909},
      {Unknown::mu, 6.13524528232e-05, 0.0162992668424},
      {Unknown::v, 1.45262047141, 0.019122529473},
      {Unknown::k, 80.0879836682, 0.0195097932103},
  };
  for (const auto& c : cases) {
    expect_rel(fisher_information(c.u, ref, 1), c.per_obs, 1e-9);
    expect_rel(normalized_crlb(c.u, ref, 1), c.crlb_norm, 1e-9);
  }
  expect_rel(fisher_terms(Unknown::d2, ref).theta, 4.56299985152, 1e-11);
}

TEST(Fisher, LinearInSAndCrlbProperties) {
  for (Unknown u : all_unknowns) {
    for (int S : {1, 3, 10}) {
      expect_rel(fisher_information(u, ref, 2 * S), 2.0 * fisher_information(u, ref, S), 1e-14);
      expect_rel(crlb(u, ref, 2 * S), 0.5 * crlb(u, ref, S), 1e-14);
    }
    EXPECT_GT(normalized_crlb(u, ref, 1), 0.0);
  }
  EXPECT_THROW(fisher_information(Unknown::v, ref, 0), validation_error);
  double prev = INFINITY;
  for (double mu : {200.0, 500.0, 1000.0, 2000.0, 5000.0}) {
    EnvParams p = ref;
    p.mu = mu;
    const double c = crlb(Unknown::mu, p, 1);
    EXPECT_LT(c / (mu * mu), prev);
    prev = c / (mu * mu);
  }
}

TEST(Fisher, MonteCarloObservedInformation) {
  // Smaller sample than the acceptance check, with a tolerance to match.
  std::mt19937_64 rng(14);
  const SkellamModel m = observation_model(ref);
  std::poisson_distribution<std::int64_t> a(m.n_hat_1), b(m.n_hat_2);
  std::vector<std::int64_t> draws(20000);
  for (auto& n : draws) n = b(rng) - a(rng);
  for (Unknown u : all_unknowns) {
    const double x = value_of(u, ref), h = 1e-3 * x;
    const SkellamModel lo = observation_model(with_value(u, ref, x - h));
    const SkellamModel mid = observation_model(with_value(u, ref, x));
    const SkellamModel hi = observation_model(with_value(u, ref, x + h));
    double sum = 0.0;
    for (auto n : draws)
      sum -= (skellam_log_pmf(n, hi) - 2.0 * skellam_log_pmf(n, mid) + skellam_log_pmf(n, lo)) / (h * h);
    expect_rel(sum / static_cast<double>(draws.size()), fisher_information(u, ref, 1), 0.05);
  }
}

TEST(Problem, NamesValuesAndLimits) {
  for (Unknown u : all_unknowns) EXPECT_EQ(parse_unknown(name(u)), u);
  EXPECT_THROW(parse_unknown("d1"), validation_error);
  const EnvParams q = with_value(Unknown::d2, ref, 12.0);
  EXPECT_EQ(q.d2, 12.0);
  EXPECT_EQ(q.d1, 28.0);
  const auto prob = default_problem(Unknown::d2, ref);
  EXPECT_EQ(prob.bracket_lo, 5.0);
  EXPECT_DOUBLE_EQ(prob.bracket_hi, 0.999 * 40.0);
  EstimationProblem bad = default_problem(Unknown::k, ref);
  bad.bracket_lo = -1.0;
  EXPECT_THROW(bad.validate(), validation_error);
  for (Estimator e : {Estimator::de, Estimator::ml_rx1, Estimator::ml_rx2}) EXPECT_EQ(parse_estimator(name(e)), e);
}

TEST(Observations, Validation) {
  EXPECT_THROW(ObservationSet::from_pairs({1, 2}, {3}), validation_error);
  EXPECT_THROW(ObservationSet::from_pairs({}, {}), validation_error);
  EXPECT_THROW(ObservationSet::from_pairs({1, -1}, {3, 4}), validation_error);
  const auto single = ObservationSet::from_single(Receiver::rx2, {4, 5, 6});
  EXPECT_FALSE(single.has_difference());
  EXPECT_THROW(single.g_diff(), validation_error);
  EXPECT_THROW(single.counts(Receiver::rx1), validation_error);
  EXPECT_EQ(sample_mean(single.counts(Receiver::rx2)), 5.0);
  const auto both = ObservationSet::from_pairs({1, 2}, {5, 9});
  EXPECT_EQ(both.g_diff(), (std::vector<std::int64_t>{4, 7}));
  EXPECT_EQ(both.shifted(3).g_diff(), both.g_diff());
}

TEST(Estimators, DeRecoversExactMean) {
  // Ñ is linear in mu, so pick mu* whose difference signal is an integer.
  const double diff = asymptotic_signal(Receiver::rx2, ref) - asymptotic_signal(Receiver::rx1, ref);
  const double mu_star = ref.mu * 96.0 / diff;
  const auto obs = ObservationSet::from_pairs({10, 20, 30}, {106, 116, 126});
  const auto est = estimate_de(default_problem(Unknown::mu, with_value(Unknown::mu, ref, mu_star)), obs);
  EXPECT_NEAR(est.value, mu_star, 1e-9 * mu_star);
  EXPECT_FALSE(est.clamped);
}

TEST(Estimators, RootsSatisfyTheMomentEquations) {
  const auto obs = ObservationSet::from_pairs({25, 31, 29, 27}, {118, 131, 120, 126});
  for (Unknown u : all_unknowns) {
    const auto prob = default_problem(u, ref);
    const double de = estimate_de(prob, obs).value;
    const EnvParams at = with_value(u, ref, de);
    EXPECT_NEAR(asymptotic_signal(Receiver::rx2, at) - asymptotic_signal(Receiver::rx1, at), sample_mean(obs.g_diff()),
                1e-8)
        << name(u);
    for (Receiver j : {Receiver::rx1, Receiver::rx2}) {
      const auto ml = estimate_ml_rx(j, prob, obs.counts(j));
      ASSERT_FALSE(ml.clamped) << name(u);
      EXPECT_NEAR(asymptotic_signal(j, with_value(u, ref, ml.value)), sample_mean(obs.counts(j)), 1e-8) << name(u);
    }
  }
}

TEST(Estimators, NoiseInvariance) {
  const auto obs = ObservationSet::from_pairs({25, 31, 29, 27}, {118, 131, 120, 126});
  for (Unknown u : all_unknowns) {
    auto prob = default_problem(u, ref);
    const double base = estimate_de(prob, obs).value;
    for (std::int64_t c : {1, 7, 250}) EXPECT_EQ(estimate_de(prob, obs.shifted(c)).value, base) << name(u);
    // Estimators never read xi.
    prob.known.xi = 17.0;
    EXPECT_EQ(estimate_de(prob, obs).value, base);
    EXPECT_EQ(estimate_ml_rx(Receiver::rx2, prob, obs.counts(Receiver::rx2)).value,
              estimate_ml_rx(Receiver::rx2, default_problem(u, ref), obs.counts(Receiver::rx2)).value);
  }
}

TEST(Estimators, BracketExpansionAndFailures) {
  auto prob = default_problem(Unknown::mu, ref);
  prob.bracket_lo = 900.0;
  prob.bracket_hi = 950.0;
  const auto far = ObservationSet::from_pairs({270}, {1229});  // about ten times the signal
  const auto est = estimate_de(prob, far);
  const double signal = channel::asymptotic_signal(Receiver::rx2, ref) - channel::asymptotic_signal(Receiver::rx1, ref);
  EXPECT_NEAR(est.value, ref.mu * 959.0 / signal, 1e-3);
  EXPECT_GE(est.bracket_hi, est.value);
  // k -> 0 caps the achievable counts: the RX estimator clamps, DE fails.
  const auto huge = ObservationSet::from_pairs({100000}, {100000000});
  const auto kp = default_problem(Unknown::k, ref);
  EXPECT_THROW(estimate_de(kp, huge), estimation_failure);
  const auto ml = estimate_ml_rx(Receiver::rx2, kp, huge.counts(Receiver::rx2));
  EXPECT_TRUE(ml.clamped);
  try {
    estimate_de(kp, huge);
  } catch (const estimation_failure& e) {
    EXPECT_GT(e.best(), 0.0);
  }
}

TEST(Estimators, PerReceiverBiasUnderNoise) {
  EnvParams noisy = ref;
  noisy.xi = 10.0;
  // Exact moment: a sample mean of Ñ_2 + xi gives mu (1 + xi / Ñ_2).
  const double n2 = asymptotic_signal(Receiver::rx2, ref);
  const double target = std::round(n2 + noisy.xi);
  const auto prob = default_problem(Unknown::mu, noisy);
  const auto ml = estimate_ml_rx(Receiver::rx2, prob, {static_cast<std::int64_t>(target)});
  EXPECT_NEAR(ml.value, ref.mu * target / n2, 1e-6);
  MseStudySpec spec;
  spec.unknown = Unknown::mu;
  spec.truth = noisy;
  spec.trials = 400;
  spec.S = 10;
  spec.seed = 5;
  const auto r = mse_study(spec, 1);
  EXPECT_NEAR(r.of(Estimator::ml_rx2).normalized_bias, noisy.xi / n2, 0.01);
  EXPECT_NEAR(r.of(Estimator::ml_rx1).normalized_bias, noisy.xi / asymptotic_signal(Receiver::rx1, ref), 0.03);
  EXPECT_LT(std::abs(r.of(Estimator::de).normalized_bias), 3.0 * std::sqrt(r.of(Estimator::de).nmse / 400.0));
}

TEST(Mse, StudyProperties) {
  for (Unknown u : {Unknown::d2, Unknown::v}) {
    double prev = INFINITY;
    for (int S : {1, 2, 5, 10}) {
      MseStudySpec spec;
      spec.unknown = u;
      spec.truth = ref;
      spec.trials = 500;
      spec.S = S;
      spec.seed = 21;
      const auto r = mse_study(spec, 2);
      const auto& de = r.of(Estimator::de);
      EXPECT_TRUE(de.valid);
      EXPECT_EQ(de.successes + de.failures, 500);
      EXPECT_GE(de.nmse, normalized_crlb(u, ref, S) - 3.0 * de.nmse_se) << name(u) << " S=" << S;
      EXPECT_LT(de.nmse, prev);
      prev = de.nmse;
    }
  }
}

TEST(Mse, ThreadCountAndPrefixStability) {
  MseStudySpec spec;
  spec.unknown = Unknown::v;
  spec.truth = ref;
  spec.trials = 150;
  spec.S = 4;
  const auto a = mse_study(spec, 1);
  const auto b = mse_study(spec, 3);
  for (std::size_t e = 0; e < a.stats.size(); ++e) {
    EXPECT_EQ(a.stats[e].nmse, b.stats[e].nmse);
    EXPECT_EQ(a.stats[e].nmse_se, b.stats[e].nmse_se);
  }
  const auto short_obs = sample_poisson_observations(ref, 3, 42);
  const auto long_obs = sample_poisson_observations(ref, 8, 42);
  for (std::size_t s = 0; s < 3; ++s) {
    EXPECT_EQ(short_obs.counts(Receiver::rx1)[s], long_obs.counts(Receiver::rx1)[s]);
    EXPECT_EQ(short_obs.counts(Receiver::rx2)[s], long_obs.counts(Receiver::rx2)[s]);
  }
  spec.trials = 99;
  EXPECT_THROW(mse_study(spec, 1), validation_error);
}

TEST(Mse, SimulatorModeRuns) {
  MseStudySpec spec;
  spec.unknown = Unknown::v;
  spec.truth = ref;
  spec.trials = 100;
  spec.S = 2;
  spec.mode = ObservationMode::simulator;
  spec.first_window_end = 6.0;
  const auto r = mse_study(spec, 1);
  for (const auto& s : r.stats) {
    EXPECT_TRUE(s.valid);
    EXPECT_TRUE(std::isfinite(s.nmse));
  }
  // Sampled windows follow the requested schedule.
  const auto obs = sample_simulated_observations(ref, spec.sim, 6.0, 3, 8);
  EXPECT_EQ(obs.size(), 3u);
  spec.first_window_end = 0.1;
  EXPECT_THROW(mse_study(spec, 1), validation_error);
}
