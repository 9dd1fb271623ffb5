#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mcest/numerics.hpp"

using namespace mcest;
using namespace mcest::numerics;

namespace {

void expect_rel(double got, double want, double tol) {
  EXPECT_LE(std::abs(got - want), tol * std::abs(want)) << "got " << got << " want " << want;
}

}  // namespace

// Reference values from 50-digit evaluation.
TEST(Erfcx, ReferenceValues) {
  const struct { double z, v; } cases[] = {
      {-26.5, 1.9245531624185688092e305}, {-10.0, 5.3762342836322708968e43},
      {-3.0, 16205.988853999586625},      {-0.5, 1.9523604891825570933},
      {1e-8, 0.99999998871620842904},     {0.3, 0.73459933456765514229},
      {1.0, 0.42758357615580700441},      {2.5, 0.21080636406114358065},
      {4.0, 0.13699945762506138989},      {5.9, 0.094307136148327032001},
      {6.0, 0.092776567800538354389},     {10.0, 0.056140992743822585858},
      {25.0, 0.022549572432641358944},    {30.0, 0.018795888861416751497},
      {100.0, 0.0056416137829894329036},  {1e4, 5.6418958072680841152e-5},
      {1e7, 5.64189583547753466e-8},
  };
  for (const auto& c : cases) expect_rel(erfcx(c.z), c.v, 1e-13);
}

TEST(Erfcx, Examples) {
  EXPECT_DOUBLE_EQ(erfcx(0.0), 1.0);
  expect_rel(erfcx(1.0) * std::exp(-1.0), 0.15729920705028513066, 1e-13);
  const double z = 1e4;
  EXPECT_NEAR(erfcx(z) * z * std::sqrt(std::numbers::pi), 1.0, 1e-6);
}

TEST(Erfcx, OverflowAndDomain) {
  EXPECT_TRUE(std::isinf(erfcx(-27.0)));
  EXPECT_THROW(erfcx(std::numeric_limits<double>::quiet_NaN()), domain_error);
  EXPECT_THROW(erfcx(INFINITY), domain_error);
}

TEST(Erfcx, PositiveAndDecreasing) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-26.0, 60.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = u(rng), b = u(rng);
    const double lo = std::min(a, b), hi = std::max(a, b);
    EXPECT_GT(erfcx(lo), 0.0);
    if (hi - lo > 1e-9) EXPECT_GT(erfcx(lo), erfcx(hi)) << lo << " " << hi;
  }
  // Dense sweep across the branch boundaries.
  double prev = erfcx(-5.0);
  for (double z = -5.0 + 1e-3; z < 12.0; z += 1e-3) {
    const double cur = erfcx(z);
    EXPECT_LT(cur, prev) << z;
    prev = cur;
  }
}

TEST(Erfcx, ExpTimesErfcMatchesNaiveWhereSafe) {
  for (double e : {-3.0, 0.0, 2.0, 10.0})
    for (double z : {-2.0, 0.1, 1.5, 4.0})
      expect_rel(exp_times_erfc(e, z), std::exp(e) * std::erfc(z), 1e-12);
  // exp(800) erfc(30) is representable although both factors are not.
  EXPECT_TRUE(std::isfinite(exp_times_erfc(800.0, 30.0)));
  EXPECT_GT(exp_times_erfc(800.0, 30.0), 0.0);
}

TEST(LogBesselI, ReferenceValues) {
  const struct { int n; double x, v; } cases[] = {
      {0, 2.0, 0.8239935414829562829},       {0, 1e-3, 2.499999843750017465e-7},
      {0, 0.5, 0.06154971918548130394},      {0, 29.9, 27.28638531055509432},
      {0, 30.1, 27.48302320895118323},       {0, 100.0, 96.77973268994258372},
      {0, 1e6, 999992.1733063128133},        {2000, 1e6, 999990.1733059794800},
      {1, 2.0, 0.4641344735461597443},       {3, 5.0, 2.335163619542435261},
      {7, 0.01, -45.61337980190221343},      {50, 10.0, -67.51795773769428284},
      {100, 1000.0, 990.6289728522302622},   {200, 300.0, 231.6635118494579510},
      {60, 700.0, 693.2340094704674430},     {1050, 1e4, 9939.398641721523997},
      {350, 1000.0, 934.9518515284570257},   {10, 1e6, 999992.1732563127883},
  };
  for (const auto& c : cases) {
    const double got = log_bessel_i(c.n, c.x);
    EXPECT_LE(std::abs(got - c.v), 1e-12 * std::max(1.0, std::abs(c.v))) << c.n << " " << c.x;
  }
}

TEST(LogBesselI, Examples) {
  for (double x : {0.1, 1.0, 7.0, 150.0}) EXPECT_DOUBLE_EQ(log_bessel_i(-3, x), log_bessel_i(3, x));
  expect_rel(std::exp(log_bessel_i(0, 2.0)), 2.2795853023360672674, 1e-13);
  // I_{n-1} - I_{n+1} = (2n/x) I_n at x = 5, n = 2.
  const double x = 5.0;
  const double im = std::exp(log_bessel_i(1, x)), i0 = std::exp(log_bessel_i(2, x)), ip = std::exp(log_bessel_i(3, x));
  EXPECT_LE(std::abs(im - ip - 4.0 / x * i0), 1e-10 * im);
}

TEST(LogBesselI, Domain) {
  EXPECT_THROW(log_bessel_i(0, 0.0), domain_error);
  EXPECT_THROW(log_bessel_i(2, -1.0), domain_error);
  EXPECT_THROW(log_bessel_i(2, INFINITY), domain_error);
}

TEST(BesselRatio, ReferenceValues) {
  const struct { int n; double x, v; } cases[] = {
      {1, 2.0, 1.433127426722311758},    {0, 10.0, 0.9485998259548459590},
      {3, 1e-3, 6000.000124999998313},   {-4, 7.5, 0.5484694748646499656},
      {25, 115.0, 1.236589535007038059}, {-30, 115.0, 0.7685202450931988978},
      {5, 1e5, 1.000045001237512374},
  };
  for (const auto& c : cases) expect_rel(bessel_ratio(c.n, c.x), c.v, 1e-13);
}

TEST(BesselRatio, Examples) {
  // I0/I1 times I1/I0.
  const double x = 2.0;
  EXPECT_NEAR(bessel_ratio(1, x) * std::exp(log_bessel_i(1, x) - log_bessel_i(0, x)), 1.0, 1e-13);
  // Small argument: I_{n-1}/I_n = (2n/x)(1 + x^2 / (4 n (n+1)) + ...).
  EXPECT_NEAR(bessel_ratio(3, 1e-3) / (6.0 / 1e-3), 1.0, 1e-6);
  EXPECT_NEAR(bessel_ratio(0, 10.0), std::exp(log_bessel_i(-1, 10.0) - log_bessel_i(0, 10.0)), 1e-10);
}

TEST(BesselRatio, IncreasesWithOrder) {
  for (double x : {0.5, 5.0, 50.0, 500.0})
    for (int n = 1; n < 50; ++n) EXPECT_LT(bessel_ratio(n, x), bessel_ratio(n + 1, x)) << n << " " << x;
}

TEST(BesselRatio, MatchesLogSpaceDifference) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> order(-200, 200);
  std::uniform_real_distribution<double> arg(0.05, 400.0);
  for (int i = 0; i < 300; ++i) {
    const int n = order(rng);
    const double x = arg(rng);
    const double want = std::exp(log_bessel_i(n - 1, x) - log_bessel_i(n, x));
    expect_rel(bessel_ratio(n, x), want, 1e-10);
  }
}

TEST(Integrate, Examples) {
  EXPECT_NEAR(integrate([](double) { return 2.0; }, 0.0, 1.0).value, 2.0, 1e-12);
  // Closed form: erfc(1) + (1 - 1/e) / sqrt(pi).
  const auto r = integrate([](double u) { return std::erfc(u); }, 0.0, 1.0);
  EXPECT_NEAR(r.value, 0.51393504188774406594, 1e-10);
  EXPECT_LE(r.error, 1e-8);
  const auto empty = integrate([](double u) { return u; }, 3.0, 3.0);
  EXPECT_EQ(empty.value, 0.0);
  EXPECT_EQ(empty.error, 0.0);
}

TEST(Integrate, Additivity) {
  const QuadratureSpec spec;
  auto f = [](double u) { return std::exp(-u) * std::cos(3.0 * u) + u * u; };
  const double whole = integrate(f, 0.0, 4.0, spec).value;
  const double parts = integrate(f, 0.0, 1.3, spec).value + integrate(f, 1.3, 4.0, spec).value;
  EXPECT_NEAR(whole, parts, 2.0 * spec.abs_tol);
}

TEST(Integrate, ToleranceNotMet) {
  QuadratureSpec spec;
  spec.abs_tol = 1e-15;
  spec.rel_tol = 1e-15;
  spec.max_subdivisions = 1;
  try {
    integrate([](double u) { return std::sin(50.0 * u) / (u + 1e-3); }, 0.0, 10.0, spec);
    FAIL() << "expected tolerance_not_met";
  } catch (const tolerance_not_met& e) {
    EXPECT_TRUE(std::isfinite(e.best()));
    EXPECT_GT(e.error_estimate(), 0.0);
  }
}

TEST(Integrate, RejectsBadSpecAndOrder) {
  QuadratureSpec spec;
  spec.abs_tol = 0.0;
  EXPECT_THROW(integrate([](double u) { return u; }, 0.0, 1.0, spec), validation_error);
  EXPECT_THROW(integrate([](double u) { return u; }, 1.0, 0.0), domain_error);
}

TEST(FindRoot, Examples) {
  RootSpec spec;
  spec.bracket_lo = 0.0;
  spec.bracket_hi = 10.0;
  EXPECT_NEAR(find_root([](double x) { return x - 3.0; }, spec).root, 3.0, 1e-10);
  spec.bracket_hi = 2.0;
  EXPECT_NEAR(find_root([](double x) { return x * x - 2.0; }, spec).root, std::sqrt(2.0), 1e-10);
  spec.bracket_hi = 5.0;
  EXPECT_NEAR(find_root([](double x) { return std::exp(-x) - 0.5; }, spec).root, std::log(2.0), 1e-10);
}

TEST(FindRoot, Idempotent) {
  auto f = [](double x) { return std::tanh(x - 1.234) + 0.1 * (x - 1.234); };
  RootSpec spec;
  spec.bracket_lo = -3.0;
  spec.bracket_hi = 7.0;
  const double r = find_root(f, spec).root;
  spec.bracket_lo = r - spec.x_tol;
  spec.bracket_hi = r + spec.x_tol;
  EXPECT_NEAR(find_root(f, spec).root, r, spec.x_tol);
}

TEST(FindRoot, Errors) {
  RootSpec spec;
  spec.bracket_lo = 0.0;
  spec.bracket_hi = 1.0;
  try {
    find_root([](double x) { return x + 1.0; }, spec);
    FAIL() << "expected no_root";
  } catch (const no_root& e) {
    EXPECT_EQ(e.best(), 0.0);  // end with the smaller |f|
  }
  spec.max_iter = 1;
  spec.x_tol = 1e-300;
  spec.f_tol = 1e-300;
  EXPECT_THROW(find_root([](double x) { return std::cbrt(x - 0.3) + 1e-3 * x; }, spec), non_convergence);
  spec.bracket_hi = -1.0;
  EXPECT_THROW(find_root([](double x) { return x; }, spec), validation_error);
}

TEST(ExpandBracket, GrowsUntilSignChangeWithinLimits) {
  auto f = [](double x) { return x - 100.0; };
  BracketExpansion ex;
  ex.lo_limit = 0.0;
  const auto [lo, hi] = expand_bracket(f, 1.0, 2.0, ex);
  EXPECT_LE(f(lo) * f(hi), 0.0);
  EXPECT_GT(lo, 0.0);
  ex.hi_limit = 50.0;
  const auto [lo2, hi2] = expand_bracket(f, 1.0, 2.0, ex);
  EXPECT_EQ(hi2, 50.0);
  EXPECT_GT(f(lo2) * f(hi2), 0.0);
}

TEST(CentralDiff, Examples) {
  EXPECT_NEAR(central_diff([](double x) { return x * x; }, 3.0, 1e-4), 6.0, 1e-6);
  EXPECT_NEAR(central_diff([](double x) { return std::exp(x); }, 0.0, 1e-5), 1.0, 1e-8);
  EXPECT_EQ(central_diff([](double) { return 4.2; }, 1.0, 1e-3), 0.0);
  EXPECT_THROW(central_diff([](double x) { return x; }, 1.0, 0.0), domain_error);
  EXPECT_EQ(default_diff_step(0.0), 1e-9);
  EXPECT_EQ(default_diff_step(2e3), 2e-3);
}
