#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlpricing/errors.hpp"
#include "nlpricing/quadratic.hpp"
#include "nlpricing/variational.hpp"

using namespace nlpricing;

namespace {

MarketEnv env_beta(double beta) {
  Preferences prefs;
  prefs.h2 = 1.0;
  return MarketEnv::make(prefs, 0.0, 1.0, 0.0, 1.0,
                         PerceptionKernel::beta_mix(beta));
}

}  // namespace

TEST_CASE("problem construction requires the beta-mixture kernel") {
  Preferences prefs;
  prefs.h2 = 1.0;
  const MarketEnv env =
      MarketEnv::make(prefs, 0.0, 1.0, 0.0, 1.0, PerceptionKernel::uniform());
  CHECK_THROWS_AS(VariationalProblem(env, Flat{0.5}), PreconditionError);
  CHECK_NOTHROW(VariationalProblem(env_beta(0.5), Flat{0.5}));
}

TEST_CASE("integrand matches the perceived-price form") {
  for (double beta : {0.0, 0.4, 1.0}) {
    const MarketEnv env = env_beta(beta);
    for (const PriceScheme& s :
         {PriceScheme{Quadratic{1.7, 0.3}}, PriceScheme{Flat{0.45}}}) {
      const VariationalProblem problem(env, s);
      for (double q : {0.05, 0.3, 0.8}) {
        const double direct =
            (marginal_price(s, q) - env.marginal_cost(q)) *
            (1.0 - env.type_cdf(perceived_marginal(env.kernel, s, q) -
                                env.prefs.h_prime(q)));
        CHECK(std::abs(problem.integrand(q, price(s, q), marginal_price(s, q)) -
                       direct) <= 1e-10);
      }
    }
  }
}

TEST_CASE("objective equals the market profit functional") {
  for (double beta : {0.0, 0.25, 0.5, 1.0}) {
    const MarketEnv env = env_beta(beta);
    for (const PriceScheme& s :
         {PriceScheme{Quadratic{2.0, 0.2}}, PriceScheme{Flat{0.5}},
          PriceScheme{Quadratic{0.0, 0.5}}}) {
      const VariationalProblem problem(env, s);
      CHECK(std::abs(problem.objective() - expected_profit(env, s)) <= 1e-9);
    }
  }
}

TEST_CASE("Euler-Lagrange residual vanishes along the rational optimum") {
  // beta = 0: the profit-optimal quadratic satisfies the pointwise FOC
  const MarketEnv env = env_beta(0.0);
  const QuadraticOptimum opt = optimal_profit_scheme(env);  // (A,B) = (0, 0.5)
  const VariationalProblem problem(env, opt.scheme());
  for (int i = 1; i < 20; ++i) {
    const double q = 0.5 * i / 20.0;
    CHECK(std::abs(euler_lagrange_residual(problem, q)) <= 1e-5);
  }
}

TEST_CASE("zero-markup candidate") {
  // P' = C': the markup factor kills dH/dP, and beyond q* the clamped
  // survival term freezes dH/dP' as well, so the residual dies off there.
  const MarketEnv env = env_beta(0.5);
  const PriceScheme s = Quadratic{1.0, 0.0};  // A = c2, B = c1
  const VariationalProblem problem(env, s);
  const double qs = problem.q_star();
  CHECK(std::isfinite(euler_lagrange_residual(problem, 0.5 * qs)));
  CHECK(std::abs(euler_lagrange_residual(problem, 1.5 * qs)) <= 1e-6);
}

TEST_CASE("beta = 1 residual profile is finite") {
  const VariationalProblem problem(env_beta(1.0), Quadratic{4.0, 0.0});
  for (double q : {0.05, 0.15, 0.3}) {
    CHECK(std::isfinite(euler_lagrange_residual(problem, q)));
  }
}

TEST_CASE("residual domain guards") {
  const VariationalProblem problem(env_beta(0.5), TwoTier{0.3, 0.8, 0.4});
  CHECK_THROWS_AS(euler_lagrange_residual(problem, 1e-8), DomainError);
  CHECK_THROWS_AS(euler_lagrange_residual(problem, 0.4), KinkError);
  CHECK_NOTHROW(euler_lagrange_residual(problem, 0.2));
}

TEST_CASE("transversality anchors") {
  SUBCASE("rational profit optimum has no distortion at the top") {
    const MarketEnv env = env_beta(0.0);
    const VariationalProblem problem(env, Quadratic{0.0, 0.5});
    const auto [gap, markup] = transversality_check(problem);
    CHECK(std::abs(gap) <= 1e-6);
    CHECK(std::abs(markup) <= 1e-6);
  }
  SUBCASE("flat tariff violates the endpoint markup condition") {
    const VariationalProblem problem(env_beta(0.0), Flat{0.6});
    const auto [gap, markup] = transversality_check(problem);
    CHECK(std::abs(gap) <= 1e-6);
    CHECK(markup == doctest::Approx(0.2).epsilon(1e-6));
  }
  SUBCASE("beta = 1 pair is reported without assertion") {
    const VariationalProblem problem(env_beta(1.0), Quadratic{4.0, 0.0});
    const auto [gap, markup] = transversality_check(problem);
    CHECK(std::abs(gap) <= 1e-6);
    CHECK(std::isfinite(markup));
  }
}

TEST_CASE("piecewise polish improves the objective and tightens residuals") {
  for (double beta : {0.0, 0.5}) {
    const MarketEnv env = env_beta(beta);
    const PolishReport report = polish_piecewise(env, 20, 12);
    REQUIRE(report.objective_path.size() >= 2);
    for (std::size_t i = 1; i < report.objective_path.size(); ++i) {
      CHECK(report.objective_path[i] >= report.objective_path[i - 1]);
    }
    CHECK(report.max_residual_path.back() <= report.max_residual_path.front());
    // the polished candidate should approach the closed-form optimum value
    const double target = optimal_profit_scheme(env).value;
    CHECK(report.objective_path.back() > 0.8 * target);
  }
}
