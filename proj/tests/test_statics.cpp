#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlpricing/errors.hpp"
#include "nlpricing/market.hpp"
#include "nlpricing/quadratic.hpp"
#include "nlpricing/statics.hpp"

using namespace nlpricing;

namespace {

MarketEnv env_with(double a1, double p, double theta1 = 1.0, double h2 = 1.0,
                   double c1 = 0.0, double h1 = 0.0) {
  Preferences prefs;
  prefs.h1 = h1;
  prefs.h2 = h2;
  return MarketEnv::make(prefs, c1, p * h2, 0.0, theta1,
                         PerceptionKernel::mix_dirac(a1));
}

double fd_p(double (*get)(const ShapeValues&), double a1, double p) {
  const double h = 1e-6;
  const double lo = std::max(0.0, p - h);
  return (get(shape_functions(a1, p + h)) - get(shape_functions(a1, lo))) /
         (p + h - lo);
}

}  // namespace

TEST_CASE("shape function anchors") {
  const ShapeValues s = shape_functions(0.5, 1.0);
  CHECK(s.F == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
  CHECK(s.G == doctest::Approx(1.0 / 18.0).epsilon(1e-12));
  CHECK(s.H == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
  CHECK(shape_functions(0.0, 1.0).F == doctest::Approx(3.0 / 8.0).epsilon(1e-14));
  CHECK_THROWS_AS(shape_functions(2.0 / 3.0, 1.0), DomainError);
  CHECK_THROWS_AS(shape_functions(0.2, -0.5), DomainError);
}

TEST_CASE("printed derivatives match finite differences") {
  for (double a1 : {0.05, 0.2, 0.45, 0.6}) {
    for (double p : {0.0, 0.7, 1.0, 3.0, 8.0}) {
      const double h = 1e-6;
      const double fdF =
          (shape_functions(a1 + h, p).F - shape_functions(a1 - h, p).F) /
          (2.0 * h);
      CHECK(shape_F_da1(a1, p) ==
            doctest::Approx(fdF).epsilon(1e-5).scale(1.0));
      const double fdH =
          (shape_functions(a1 + h, p).H - shape_functions(a1 - h, p).H) /
          (2.0 * h);
      CHECK(shape_H_da1(a1, p) ==
            doctest::Approx(fdH).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("consistency triangle with the market functionals") {
  for (double a1 : {0.0, 0.3, 0.5}) {
    for (double p : {0.5, 1.0, 2.0}) {
      for (double theta1 : {1.0, 2.0}) {
        const MarketEnv env = env_with(a1, p, theta1);
        const double K = theta1 * theta1 * theta1 / (6.0 * theta1 * 1.0);
        const ShapeValues s = shape_functions(a1, p);
        const QuadraticOptimum popt = optimal_profit_scheme(env);
        const PriceScheme scheme = popt.scheme();
        CHECK(std::abs(K * s.F - expected_welfare(env, scheme)) <=
              1e-9 * std::max(1.0, K * s.F));
        CHECK(std::abs(K * s.H - consumer_surplus(env, scheme)) <=
              1e-9 * std::max(1.0, K * s.H));
        CHECK(std::abs(K * s.G - efficiency_cost(env)) <=
              1e-9 * std::max(1.0, K * s.G));
        CHECK(std::abs(popt.value - K * (1.0 - a1) * (1.0 - a1) /
                                        ((2.0 - 3.0 * a1) *
                                         ((1.0 - a1) * p + 1.0))) <= 1e-12);
      }
    }
  }
}

TEST_CASE("efficiency cost anchors") {
  CHECK(efficiency_cost(env_with(0.5, 1.0)) ==
        doctest::Approx(1.0 / 108.0).epsilon(1e-12));
  CHECK(efficiency_cost(env_with(0.0, 1.0)) ==
        doctest::Approx(1.0 / 48.0).epsilon(1e-12));
  // boundary p = 0: cost equals K * (1 - F(a1, 0))
  const double K = 1.0 / 6.0;
  CHECK(efficiency_cost(env_with(0.3, 0.0)) ==
        doctest::Approx(K * (1.0 - shape_functions(0.3, 0.0).F)).epsilon(1e-12));
  // works without the p-normalization too (h2 = 0, pure cost curvature)
  Preferences prefs;
  const MarketEnv env_h2_zero =
      MarketEnv::make(prefs, 0.0, 1.0, 0.0, 1.0, PerceptionKernel::dirac0());
  CHECK(efficiency_cost(env_h2_zero) >= 0.0);
  CHECK(efficiency_cost(env_h2_zero) ==
        doctest::Approx(optimal_welfare_scheme(env_h2_zero).value -
                        quadratic_welfare_closed(
                            env_h2_zero, optimal_profit_scheme(env_h2_zero).A,
                            optimal_profit_scheme(env_h2_zero).B))
            .epsilon(1e-12));
}

TEST_CASE("welfare bias derivative sign regions") {
  CHECK(welfare_bias_derivative_sign(0.4, 1.0) == Sign::positive);
  CHECK(welfare_bias_derivative_sign(0.6, 1.0) == Sign::negative);
  CHECK(welfare_bias_derivative_sign(0.2, 1.0) == Sign::undetermined);
  CHECK(welfare_bias_derivative_sign(0.52, 1.0) == Sign::undetermined);
}

TEST_CASE("profit bias derivative sign") {
  CHECK(profit_bias_derivative_sign(0.1, 1.0, 1.0).sign == Sign::positive);
  CHECK(profit_bias_derivative_sign(0.6, 1.0, 1.0).sign == Sign::positive);
  const ProfitBiasSign below = profit_bias_derivative_sign(0.2, 0.0, 1.0);
  CHECK(below.sign == Sign::negative);
  REQUIRE(below.minimizer.has_value());
  CHECK(*below.minimizer == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(profit_bias_derivative_sign(1.0 / 3.0, 0.0, 1.0).sign == Sign::zero);
  CHECK_FALSE(profit_bias_derivative_sign(0.2, 2.0, 1.0).minimizer.has_value());
}

TEST_CASE("surplus bias derivative sign") {
  const SurplusBiasSign plus = surplus_bias_derivative_sign(0.1, 1.5);
  CHECK(plus.sign == Sign::positive);
  CHECK(plus.from_proposition);
  const SurplusBiasSign minus = surplus_bias_derivative_sign(0.5, 1.0);
  CHECK(minus.sign == Sign::negative);
  CHECK(minus.from_proposition);
  const SurplusBiasSign origin = surplus_bias_derivative_sign(0.0, 0.0);
  CHECK(origin.sign == Sign::positive);
  CHECK(origin.from_proposition);
  // outside both claimed regions: resolved numerically
  const SurplusBiasSign numeric = surplus_bias_derivative_sign(0.35, 3.0);
  CHECK_FALSE(numeric.from_proposition);
  CHECK(numeric.sign != Sign::undetermined);
}

TEST_CASE("auxiliary polynomial anchors") {
  for (int i = 0; i <= 19; ++i) {
    const double p = 1.94 * i / 19;
    const double f1 = shape_functions((1.0 - p) / (3.0 - p), p).f_aux;
    const double anchor1 = 2.0 * p * (p + 3.0) * (p + 3.0) /
                           ((p - 3.0) * (p - 3.0) * (p - 3.0));
    CHECK(f1 == doctest::Approx(anchor1).epsilon(1e-9).scale(1.0));
    CHECK(f1 <= 1e-12);
    if (p >= 1.0) {  // (p-1)/(p+1) >= 0 so inside the domain
      const double f2 = shape_functions((p - 1.0) / (p + 1.0), p).f_aux;
      const double anchor2 = 2.0 *
                             (7.0 * p * p * p - 18.0 * p * p + 23.0 * p - 28.0) /
                             ((p + 1.0) * (p + 1.0) * (p + 1.0));
      CHECK(f2 == doctest::Approx(anchor2).epsilon(1e-9).scale(1.0));
      CHECK(f2 < 0.0);
    }
  }
}

TEST_CASE("both-benefit region") {
  for (double p : {1.2, 1.5, 1.9}) {
    const double bound = (p - 1.0) / (p + 1.0);
    for (double a1 : {0.25 * bound, 0.6 * bound, 0.9 * bound}) {
      CHECK(profit_bias_derivative_sign(a1, p, 1.0).sign == Sign::positive);
      const SurplusBiasSign s = surplus_bias_derivative_sign(a1, p);
      CHECK(s.sign == Sign::positive);
    }
  }
}

TEST_CASE("dG/dp is negative for a1 <= 1/2 (coarse grid)") {
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      const double a1 = 0.5 * i / 10;
      const double p = 10.0 * j / 10;
      CHECK(fd_p([](const ShapeValues& s) { return s.G; }, a1, p) < 0.0);
    }
  }
}

TEST_CASE("sweep rows and properties") {
  const MarketEnv tmpl = env_with(0.0, 1.0);
  SweepOptions opt;
  opt.exec = Exec::serial;

  SUBCASE("singleton grid matches the anchors") {
    const double a1 = 0.5, p = 1.0;
    const auto rows = sweep(tmpl, std::span(&a1, 1), std::span(&p, 1), opt);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].F == doctest::Approx(4.0 / 9.0));
    CHECK(rows[0].G == doctest::Approx(1.0 / 18.0));
    CHECK(rows[0].H == doctest::Approx(1.0 / 9.0));
    CHECK(rows[0].profit == doctest::Approx(1.0 / 18.0));
    CHECK(rows[0].welfare == doctest::Approx(2.0 / 27.0));
    CHECK(rows[0].surplus == doctest::Approx(1.0 / 54.0));
    CHECK(rows[0].efficiency_cost == doctest::Approx(1.0 / 108.0));
  }

  SUBCASE("G column strictly decreasing in p at a1 = 0") {
    const double a1 = 0.0;
    std::vector<double> p_grid;
    for (int i = 0; i <= 16; ++i) p_grid.push_back(4.0 * i / 16);
    const auto rows = sweep(tmpl, std::span(&a1, 1), p_grid, opt);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i].G < rows[i - 1].G);
    }
  }

  SUBCASE("empty grid gives an empty table") {
    const auto rows = sweep(tmpl, {}, {}, opt);
    CHECK(rows.empty());
  }

  SUBCASE("quadrature cross-check passes on a dense grid") {
    std::vector<double> a1_grid, p_grid;
    for (int i = 0; i < 7; ++i) a1_grid.push_back(0.6 * i / 6);
    for (int i = 0; i < 5; ++i) p_grid.push_back(0.25 + i);
    SweepOptions checked = opt;
    checked.seed = 99;
    checked.cross_checks = 5;
    CHECK_NOTHROW(sweep(tmpl, a1_grid, p_grid, checked));
  }
}
