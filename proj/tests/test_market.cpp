#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nlpricing/errors.hpp"
#include "nlpricing/market.hpp"

using namespace nlpricing;

namespace {

// theta ~ U[0,1], h(q) = -q^2/2, C(q) = q^2/2.
MarketEnv env_e1(PerceptionKernel kernel) {
  Preferences prefs;
  prefs.h2 = 1.0;
  return MarketEnv::make(prefs, 0.0, 1.0, 0.0, 1.0, std::move(kernel));
}

}  // namespace

TEST_CASE("environment validation names the failed hypothesis") {
  Preferences prefs;
  prefs.h2 = 0.0;
  CHECK_THROWS_WITH_AS(
      MarketEnv::make(prefs, 0.0, 0.0, 0.0, 1.0, PerceptionKernel::dirac0()),
      doctest::Contains("c2 + h2 > 0"), PreconditionError);
  prefs.h2 = 1.0;
  CHECK_THROWS_WITH_AS(
      MarketEnv::make(prefs, 2.0, 1.0, 0.0, 1.0, PerceptionKernel::dirac0()),
      doctest::Contains("theta1 + h1 - c1 > 0"), PreconditionError);
  CHECK_THROWS_AS(
      MarketEnv::make(prefs, 0.0, 1.0, 1.0, 1.0, PerceptionKernel::dirac0()),
      PreconditionError);
  CHECK_THROWS_AS(
      MarketEnv::make(prefs, -0.1, 1.0, 0.0, 1.0, PerceptionKernel::dirac0()),
      PreconditionError);
}

TEST_CASE("proposition validity flags") {
  CHECK(env_e1(PerceptionKernel::mix_dirac(0.5)).prop2_valid);
  CHECK_FALSE(env_e1(PerceptionKernel::mix_dirac(0.7)).prop2_valid);
  CHECK(env_e1(PerceptionKernel::mix_dirac(0.7)).prop3_valid);
  CHECK_FALSE(env_e1(PerceptionKernel::mix_dirac(1.0)).prop3_valid);
}

TEST_CASE("cutoff types per mode") {
  const MarketEnv env = env_e1(PerceptionKernel::uniform());
  CHECK(cutoff_type(env, Flat{0.6}, 0.4, CutoffMode::rational) ==
        doctest::Approx(1.0));
  CHECK(cutoff_type(env, Quadratic{4, 0}, 1.0 / 3.0, CutoffMode::perceived) ==
        doctest::Approx(1.0));
  CHECK(cutoff_type(env, Quadratic{4, 0.25}, 0.0, CutoffMode::perceived) ==
        doctest::Approx(0.25));  // B - h'(0)
  CHECK(cutoff_type(env, TwoTier{0.4, 0.9, 0.5}, 1.0, CutoffMode::average) ==
        doctest::Approx(0.65 + 1.0));
}

TEST_CASE("max quantity") {
  const MarketEnv env = env_e1(PerceptionKernel::uniform());
  CHECK(max_quantity(env, Quadratic{4, 0}, CutoffMode::perceived) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(max_quantity(env, Flat{0.6}, CutoffMode::rational) ==
        doctest::Approx(0.4).epsilon(1e-9));
  CHECK(max_quantity(env, Quadratic{2, 1.0}, CutoffMode::perceived) == 0.0);
}

TEST_CASE("infinite q* sentinel and unbounded-domain error") {
  Preferences prefs;  // h2 = 0: flat cutoff never reaches theta1
  CHECK_NOTHROW(validate(prefs));
  const MarketEnv env =
      MarketEnv::make(prefs, 0.0, 1.0, 0.0, 1.0, PerceptionKernel::dirac0());
  CHECK(std::isinf(max_quantity(env, Flat{0.5}, CutoffMode::rational)));
  CHECK_THROWS_AS(expected_profit(env, Flat{0.5}), UnboundedDomainError);
}

TEST_CASE("expected profit anchors") {
  CHECK(expected_profit(env_e1(PerceptionKernel::dirac0()), Quadratic{0, 0.5}) ==
        doctest::Approx(1.0 / 24.0).epsilon(1e-12));
  CHECK(expected_profit(env_e1(PerceptionKernel::uniform()), Quadratic{4, 0}) ==
        doctest::Approx(1.0 / 18.0).epsilon(1e-12));
  // marginal-cost pricing: zero markup everywhere
  CHECK(std::abs(expected_profit(env_e1(PerceptionKernel::beta_mix(0.6)),
                                 Quadratic{1.0, 0.0})) < 1e-12);
}

TEST_CASE("closed form agrees with quadrature and type space") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<PerceptionKernel> kernels = {
      PerceptionKernel::dirac0(), PerceptionKernel::uniform(),
      PerceptionKernel::mix_dirac(0.35), PerceptionKernel::beta_mix(0.7)};
  for (const auto& kernel : kernels) {
    for (int i = 0; i < 6; ++i) {
      const MarketEnv env = env_e1(kernel);
      // stay inside the exact regime: B >= theta0 + h1 = 0
      const double B = u(rng) * 0.8;
      const double A = 3.0 * u(rng) - 0.5;
      if ((1.0 - kernel.mean_fraction()) * A + 1.0 <= 0.1) continue;
      const PriceScheme s = Quadratic{A, B};
      const double closed = expected_profit(env, s);
      CHECK(std::abs(closed - expected_profit_quadrature(env, s)) <= 1e-9);
      CHECK(std::abs(closed - expected_profit_typespace(env, s)) <= 1e-7);
      const double w = expected_welfare(env, s);
      CHECK(std::abs(w - expected_welfare_quadrature(env, s)) <= 1e-9);
      CHECK(std::abs(w - expected_welfare_typespace(env, s)) <= 1e-7);
    }
  }
}

TEST_CASE("expected welfare anchors") {
  CHECK(expected_welfare(env_e1(PerceptionKernel::uniform()), Quadratic{4, 0}) ==
        doctest::Approx(2.0 / 27.0).epsilon(1e-9));
  // welfare-maximizing scheme: value independent of the kernel
  CHECK(expected_welfare(env_e1(PerceptionKernel::dirac0()), Quadratic{1, 0}) ==
        doctest::Approx(1.0 / 12.0).epsilon(1e-12));
  CHECK(expected_welfare(env_e1(PerceptionKernel::uniform()), Quadratic{2, 0}) ==
        doctest::Approx(1.0 / 12.0).epsilon(1e-12));
  // zero trade
  CHECK(expected_welfare(env_e1(PerceptionKernel::uniform()), Quadratic{1, 1}) ==
        0.0);
}

TEST_CASE("consumer surplus anchors") {
  CHECK(consumer_surplus(env_e1(PerceptionKernel::uniform()), Quadratic{4, 0}) ==
        doctest::Approx(1.0 / 54.0).epsilon(1e-9));
  CHECK(consumer_surplus(env_e1(PerceptionKernel::dirac0()), Quadratic{0, 0.5}) ==
        doctest::Approx(1.0 / 48.0).epsilon(1e-9));
  CHECK(consumer_surplus(env_e1(PerceptionKernel::uniform()), Quadratic{1, 1}) ==
        0.0);
}

TEST_CASE("welfare equals profit plus surplus through independent routes") {
  const MarketEnv env = env_e1(PerceptionKernel::beta_mix(0.8));
  const PriceScheme s = Quadratic{1.3, 0.2};
  const double w_types = expected_welfare_typespace(env, s);
  const double pi_types = expected_profit_typespace(env, s);
  CHECK(std::abs(consumer_surplus(env, s) - (w_types - pi_types)) <= 1e-7);
}

TEST_CASE("welfare through the q-space route needs a continuous perceived price") {
  const MarketEnv env = env_e1(PerceptionKernel::dirac0());
  const PriceScheme tt = TwoTier{0.4, 0.9, 0.5};
  CHECK_THROWS_AS(expected_welfare_quadrature(env, tt), KinkError);
  // the dispatcher falls back to type space and stays consistent
  CHECK(expected_welfare(env, tt) ==
        doctest::Approx(expected_welfare_typespace(env, tt)).epsilon(1e-12));
  // with the uniform kernel the perceived price is continuous: both routes run
  const MarketEnv env_u = env_e1(PerceptionKernel::uniform());
  CHECK(std::abs(expected_welfare_quadrature(env_u, tt) -
                 expected_welfare_typespace(env_u, tt)) <= 1e-7);
}

TEST_CASE("quantity distribution is a CDF reaching one at q*") {
  const MarketEnv env = env_e1(PerceptionKernel::uniform());
  const PriceScheme s = TwoTier{0.3, 0.8, 0.4};
  const double qs = max_quantity(env, s, CutoffMode::perceived);
  double prev = -1.0;
  for (int i = 0; i <= 64; ++i) {
    const double q = qs * i / 64;
    const double F = env.type_cdf(cutoff_type(env, s, q, CutoffMode::perceived));
    CHECK(F >= prev - 1e-12);
    prev = F;
  }
  CHECK(env.type_cdf(cutoff_type(env, s, qs, CutoffMode::perceived)) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("aggregate consumption anchors") {
  const MarketEnv env = env_e1(PerceptionKernel::dirac0());
  for (double lambda : {0.0, 0.31, 1.0}) {
    CHECK(aggregate_consumption(env, Flat{0.6}, lambda) ==
          doctest::Approx(0.08).epsilon(1e-8));
  }
  const PriceScheme tt = TwoTier{0.4, 0.9, 0.5};
  CHECK(aggregate_consumption(env, tt, 0.0) ==
        doctest::Approx(0.175).epsilon(1e-8));
  CHECK(aggregate_consumption(env, tt, 1.0) ==
        doctest::Approx(0.17758320877760412).epsilon(1e-6));
}

TEST_CASE("aggregate consumption is affine in lambda") {
  const MarketEnv env = env_e1(PerceptionKernel::dirac0());
  const PriceScheme tt = TwoTier{0.35, 1.1, 0.3};
  const double q0 = aggregate_consumption(env, tt, 0.0);
  const double qh = aggregate_consumption(env, tt, 0.5);
  const double q1 = aggregate_consumption(env, tt, 1.0);
  CHECK(std::abs(qh - 0.5 * (q0 + q1)) <= 1e-9);
}

TEST_CASE("aggregate consumption rejects bad fractions") {
  const MarketEnv env = env_e1(PerceptionKernel::dirac0());
  CHECK_THROWS_AS(aggregate_consumption(env, Flat{0.5}, 1.5), DomainError);
}
