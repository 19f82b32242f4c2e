#pragma once

#include <utility>

#include "nlpricing/exec.hpp"
#include "nlpricing/market.hpp"

namespace nlpricing {

enum class Objective { profit, welfare };

struct QuadraticOptimum {
  double A = 0.0;
  double B = 0.0;
  double q_star = 0.0;
  double value = 0.0;
  Objective objective = Objective::profit;

  Quadratic scheme() const { return Quadratic{A, B}; }
};

// Profit-maximizing quadratic tariff, closed form:
//   A = [(1-a1)c2 + (3a1-1)h2] / [(1-a1)(2-3a1)]
//   B = [(1-2a1)(theta1+h1) + (1-a1)c1] / (2-3a1)
// Throws PreconditionError naming the failed hypothesis bullet.
QuadraticOptimum optimal_profit_scheme(const MarketEnv& env);

// Welfare-maximizing quadratic tariff: A = c2/(1-a1), B = c1 (marginal-cost
// pricing in perceived terms); the value does not depend on a1.
QuadraticOptimum optimal_welfare_scheme(const MarketEnv& env);

// Reduced profit FOC residuals, zero exactly at the closed-form optimum:
//   r1 = (theta1+h1-B)(c2+h2-a1 A)                - 2 (B-c1) kappa
//   r2 = (theta1+h1-B)(-(1-a1)A + h2 + 2c2(1-a1)) - 3 (1-a1)(B-c1) kappa
// with kappa = (1-a1)A + h2. Throws DegenerateSchemeError when q* <= 0.
std::pair<double, double> profit_foc_residuals(const MarketEnv& env, double A,
                                               double B);

// The same residuals via adaptive quadrature of the raw Leibniz-rule
// integrals, rescaled to the reduced forms. Independent cross-check route.
std::pair<double, double> profit_foc_residuals_quadrature(const MarketEnv& env,
                                                          double A, double B);

// Reduced welfare FOC residuals, zero at the welfare optimum:
//   rA = 2 (theta1+h1-B)(c2 - (1-a1)A) - 3 (B-c1) kappa
//   rB =   (theta1+h1-B)(c2 - (1-a1)A) - 2 (B-c1) kappa
std::pair<double, double> welfare_foc_residuals(const MarketEnv& env, double A,
                                                double B);

std::pair<double, double> welfare_foc_residuals_quadrature(const MarketEnv& env,
                                                           double A, double B);

// Closed polynomial antiderivatives of the quadratic-scheme profit and
// welfare integrals (exact wherever the survival term is unclamped).
double quadratic_profit_closed(const MarketEnv& env, double A, double B);
double quadratic_welfare_closed(const MarketEnv& env, double A, double B);

// The objective the closed forms maximize, evaluated by quadrature of the
// integrand over [0, q*(A,B)] with the affine uniform survival term.
// Candidates whose cutoff slope (1-a1)A + h2 is nonpositive get -infinity;
// zero-trade candidates (q* <= 0) get 0.
double quadratic_objective(const MarketEnv& env, Objective objective, double A,
                           double B);

struct SearchOptions {
  int grid_n = 41;             // grid points per axis in the coarse stage
  int max_polish_evals = 2000; // Nelder-Mead evaluation budget
  double box_scale_A = 5.0;    // A in [-s(c2+h2), s(c2+h2)]
  Exec exec = Exec::parallel;
};

// Independent derivative-free optimizer (coarse grid + Nelder-Mead polish,
// free to leave the box). Used as the oracle for the closed forms. Throws
// OracleDisagreementError if the search value is nonpositive while the
// closed form is positive.
QuadraticOptimum numeric_quadratic_search(const MarketEnv& env,
                                          Objective objective,
                                          const SearchOptions& opt = {});

// max-profit / max-welfare ratio,
//   (1-a1)^2 (c2+h2) / [(2-3a1)((1-a1)c2 + h2)].
double profit_welfare_ratio(const MarketEnv& env);

}  // namespace nlpricing
