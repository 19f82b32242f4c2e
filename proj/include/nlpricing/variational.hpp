#pragma once

#include <utility>
#include <vector>

#include "nlpricing/market.hpp"

namespace nlpricing {

// Variational diagnostics for the beta-mixture perception family, where the
// perceived marginal price is beta * P(q)/q + (1-beta) * P'(q) and expected
// profit is a classical functional of (q, P, P').
class VariationalProblem {
 public:
  // env.kernel must be a beta_mix kernel; throws PreconditionError otherwise.
  VariationalProblem(MarketEnv env, PriceScheme scheme);

  double beta() const { return beta_; }
  const MarketEnv& env() const { return env_; }
  const PriceScheme& scheme() const { return scheme_; }

  // Pointwise integrand (P' - C')(1 - F(beta P/q + (1-beta) P' - h')).
  double integrand(double q, double P, double Pprime) const;

  // Expected profit of the candidate scheme, by quadrature up to q*.
  double objective(double abs_tol = 1e-10) const;

  double q_star() const;

 private:
  MarketEnv env_;
  PriceScheme scheme_;
  double beta_;
};

// Euler-Lagrange residual dH/dP - d/dq(dH/dP') at q, all partials by central
// finite differences with magnitude-scaled steps. q must be >= 1e-6 and away
// from tariff kinks (KinkError otherwise).
double euler_lagrange_residual(const VariationalProblem& problem, double q);

// Endpoint conditions at q*: the pair
//   (perceived(q*) - h'(q*) - theta1,  P'(q*) - C'(q*)).
// Both vanish at an unconstrained optimum when beta != 1 ("no distortion at
// the top"). Throws UnboundedDomainError for infinite q*.
std::pair<double, double> transversality_check(const VariationalProblem& problem);

struct PolishReport {
  std::vector<double> objective_path;     // one entry per accepted iterate
  std::vector<double> max_residual_path;  // max |EL residual| on a mid-segment grid
  PiecewiseLinear final_scheme;
};

// Diagnostic polish of a piecewise-linear candidate: finite-difference
// ascent on the segment slopes with backtracking, slopes projected to stay
// nonnegative and the cutoff map kept increasing. The objective path is
// nondecreasing by construction; the residual path is reported.
PolishReport polish_piecewise(const MarketEnv& env, int segments = 20,
                              int iterations = 25);

}  // namespace nlpricing
