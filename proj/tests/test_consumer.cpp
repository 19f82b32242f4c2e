#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nlpricing/consumer.hpp"
#include "nlpricing/errors.hpp"

using namespace nlpricing;

namespace {

Preferences quad_prefs(double h1, double h2) {
  Preferences p;
  p.h1 = h1;
  p.h2 = h2;
  return p;
}

}  // namespace

TEST_CASE("marginal utility") {
  CHECK(marginal_utility(quad_prefs(0, 1), 0.0, 1.0) == doctest::Approx(1.0));
  CHECK(marginal_utility(quad_prefs(0, 1), 0.5, 1.0) == doctest::Approx(0.5));
  CHECK(marginal_utility(quad_prefs(2, 3), 1.0, 0.0) == doctest::Approx(-1.0));
}

TEST_CASE("preference validation") {
  CHECK_THROWS_AS(validate(quad_prefs(-1, 1)), DomainError);
  Preferences bad;
  bad.h_custom = [](double q) { return q; };  // missing h'
  CHECK_THROWS_AS(validate(bad), DomainError);
  Preferences log_like;
  log_like.h_custom = [](double q) { return std::log1p(q) - q; };
  log_like.h_prime_custom = [](double q) { return 1.0 / (1.0 + q) - 1.0; };
  CHECK_NOTHROW(validate(log_like));
}

TEST_CASE("best response anchors") {
  const Preferences prefs = quad_prefs(0, 1);
  CHECK(best_response(prefs, PerceptionKernel::dirac0(), Flat{0.5}, 1.0) ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(best_response(prefs, PerceptionKernel::uniform(), Flat{0.5}, 0.3) == 0.0);
  CHECK(best_response(prefs, PerceptionKernel::dirac0(), Flat{0.5}, 0.3) == 0.0);
  // average-price consumer on a two-tier tariff: positive root of
  // q^2 - 0.1 q - 0.25 = 0
  CHECK(best_response(prefs, PerceptionKernel::uniform(), TwoTier{0.4, 0.9, 0.5},
                      1.0) == doctest::Approx(0.5524937810560445).epsilon(1e-9));
}

TEST_CASE("closed form for quadratic tariffs under linear-mean kernels") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<PerceptionKernel> kernels = {
      PerceptionKernel::dirac0(), PerceptionKernel::uniform(),
      PerceptionKernel::mix_dirac(0.42), PerceptionKernel::beta_mix(0.9)};
  for (const auto& kernel : kernels) {
    const double a1 = kernel.mean_fraction();
    for (int i = 0; i < 20; ++i) {
      const Preferences prefs = quad_prefs(u(rng), 0.3 + u(rng));
      const double A = 2.0 * u(rng);
      const double B = u(rng);
      const double theta = 2.0 * u(rng);
      const double kappa = (1.0 - a1) * A + prefs.h2;
      const double expected = std::max(0.0, (theta + prefs.h1 - B) / kappa);
      CHECK(best_response(prefs, kernel, Quadratic{A, B}, theta) ==
            doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("best response is nondecreasing in theta") {
  const Preferences prefs = quad_prefs(0, 1);
  const PriceScheme s = TwoTier{0.3, 1.0, 0.4};
  double prev = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double theta = 1.6 * i / 40;
    const double q = best_response(prefs, PerceptionKernel::uniform(), s, theta);
    CHECK(q >= prev - 1e-12);
    prev = q;
  }
}

TEST_CASE("nonmonotone cutoff detection") {
  // slopes drop 2 -> 0.1 at q = 0.5, overwhelming the h' term
  const PiecewiseLinear pwl{{0.0, 0.5, 1.0}, {2.0, 0.1, 3.0}};
  const Preferences prefs = quad_prefs(0, 0.5);
  CHECK_THROWS_AS(
      best_response(prefs, PerceptionKernel::dirac0(), PriceScheme{pwl}, 2.5),
      NonmonotoneCutoffError);
}

TEST_CASE("unbounded demand error") {
  const Preferences prefs = quad_prefs(0, 0.1);
  const PriceScheme s = Quadratic{-1.0, 2.0};
  BestResponseOptions opt;
  opt.q_cap = 1e4;
  CHECK_THROWS_AS(best_response(prefs, PerceptionKernel::dirac0(), s, 3.0, opt),
                  UnboundedDemandError);
}

TEST_CASE("dynamics anchors") {
  const Preferences prefs = quad_prefs(0, 1);
  SUBCASE("flat tariff, rational") {
    const DynamicsResult r =
        simulate_dynamics(prefs, PerceptionKernel::dirac0(), Flat{0.5}, 1.0, 0.1);
    CHECK(r.converged);
    CHECK(r.terminal() == doctest::Approx(0.5).epsilon(1e-6));
  }
  SUBCASE("quadratic tariff, average-price consumer") {
    const DynamicsResult r = simulate_dynamics(
        prefs, PerceptionKernel::uniform(), Quadratic{4, 0}, 1.0, 1.0);
    CHECK(r.converged);
    CHECK(r.terminal() == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  }
  SUBCASE("corner type drifts to zero") {
    const DynamicsResult r = simulate_dynamics(
        prefs, PerceptionKernel::uniform(), Flat{0.5}, 0.3, 0.7);
    CHECK(r.converged);
    CHECK(r.terminal() == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("dynamics argument validation and non-convergence report") {
  const Preferences prefs = quad_prefs(0, 1);
  CHECK_THROWS_AS(
      simulate_dynamics(prefs, PerceptionKernel::dirac0(), Flat{0.5}, 1.0, 0.0),
      DomainError);
  const DynamicsResult r = simulate_dynamics(
      prefs, PerceptionKernel::dirac0(), Flat{0.5}, 1.0, 0.01, 1.0, 0.1, 5);
  CHECK_FALSE(r.converged);
  CHECK(r.trajectory.size() == 5);
}

TEST_CASE("steady state matches best response on a randomized battery") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  while (checked < 50) {
    const Preferences prefs = quad_prefs(0.5 * u(rng), 0.4 + u(rng));
    PerceptionKernel kernel = PerceptionKernel::dirac0();
    switch (static_cast<int>(u(rng) * 4.0) % 4) {
      case 0: kernel = PerceptionKernel::dirac0(); break;
      case 1: kernel = PerceptionKernel::uniform(); break;
      case 2: kernel = PerceptionKernel::beta_mix(u(rng)); break;
      default: kernel = PerceptionKernel::mix_dirac(u(rng)); break;
    }
    PriceScheme scheme = Flat{0.2 + 0.6 * u(rng)};
    const int pick = static_cast<int>(u(rng) * 3.0) % 3;
    if (pick == 1) scheme = Quadratic{2.5 * u(rng), 0.7 * u(rng)};
    double theta = 2.0 * u(rng);
    if (pick == 2) {
      const double p2 = 0.2 + 0.3 * u(rng);
      const TwoTier tt{p2, p2 + 0.3 + 0.5 * u(rng), 0.2 + 0.5 * u(rng)};
      if (kernel.kind() != PerceptionKernel::Kind::uniform) {
        // keep the type away from bunching intervals, where the fixed-step
        // Euler iteration chatters across the perceived-price jump
        const double gap_lo =
            perceived_marginal(kernel, tt, tt.qbar * (1 - 1e-9)) +
            prefs.h2 * tt.qbar - prefs.h1;
        const double gap_hi = perceived_marginal(kernel, tt, tt.qbar * 4.0) +
                              prefs.h2 * tt.qbar * 4.0 - prefs.h1;
        if (theta > gap_lo - 0.05 && theta < gap_hi + 0.05) continue;
      }
      scheme = tt;
    }
    const double target = best_response(prefs, kernel, scheme, theta);
    const DynamicsResult r =
        simulate_dynamics(prefs, kernel, scheme, theta, 0.05 + u(rng));
    REQUIRE(r.converged);
    CHECK(r.terminal() == doctest::Approx(target).epsilon(1e-6));
    ++checked;
  }
}
