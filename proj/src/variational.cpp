#include "nlpricing/variational.hpp"

#include <algorithm>
#include <cmath>

#include "nlpricing/errors.hpp"
#include "nlpricing/quadratic.hpp"
#include "nlpricing/quadrature.hpp"

namespace nlpricing {

VariationalProblem::VariationalProblem(MarketEnv env, PriceScheme scheme)
    : env_(std::move(env)), scheme_(std::move(scheme)) {
  if (env_.kernel.kind() != PerceptionKernel::Kind::beta_mix) {
    throw PreconditionError("beta-mixture kernel",
                            "the variational family needs perceived = beta*P/q + (1-beta)*P'");
  }
  validate(scheme_);
  beta_ = env_.kernel.parameter();
}

double VariationalProblem::integrand(double q, double P, double Pprime) const {
  const double perceived =
      q > 0.0 ? beta_ * P / q + (1.0 - beta_) * Pprime : Pprime;
  const double theta = perceived - env_.prefs.h_prime(q);
  return (Pprime - env_.marginal_cost(q)) * (1.0 - env_.type_cdf(theta));
}

double VariationalProblem::q_star() const {
  CutoffMap map(env_, scheme_, CutoffMode::perceived);
  map.require_increasing();
  return map.q_star();
}

double VariationalProblem::objective(double abs_tol) const {
  const double qs = q_star();
  if (!std::isfinite(qs)) {
    throw UnboundedDomainError("q* is infinite; the objective has no finite domain");
  }
  if (qs == 0.0) return 0.0;
  std::vector<double> panels;
  for (double k : kink_points(scheme_)) {
    if (k > 0.0 && k < qs) panels.push_back(k);
  }
  return integrate_with_panels(
      [&](double q) {
        return integrand(q, price(scheme_, q), marginal_price(scheme_, q));
      },
      0.0, qs, panels, {abs_tol, 48});
}

double euler_lagrange_residual(const VariationalProblem& problem, double q) {
  if (!(q >= 1e-6)) {
    throw DomainError("residual evaluation starts at q >= 1e-6");
  }
  const PriceScheme& s = problem.scheme();
  const double dq = std::max(1e-8, 1e-5 * q);
  for (double k : kink_points(s)) {
    if (std::abs(q - k) <= 2.0 * dq) {
      throw KinkError("Euler-Lagrange residual is not defined across a tariff kink");
    }
  }
  const auto dH_dP = [&](double x) {
    const double P = price(s, x);
    const double Pp = marginal_price(s, x);
    const double d = std::max(1e-8, 1e-5 * std::abs(P));
    return (problem.integrand(x, P + d, Pp) - problem.integrand(x, P - d, Pp)) /
           (2.0 * d);
  };
  const auto dH_dPp = [&](double x) {
    const double P = price(s, x);
    const double Pp = marginal_price(s, x);
    const double d = std::max(1e-8, 1e-5 * std::abs(Pp));
    return (problem.integrand(x, P, Pp + d) - problem.integrand(x, P, Pp - d)) /
           (2.0 * d);
  };
  return dH_dP(q) - (dH_dPp(q + dq) - dH_dPp(q - dq)) / (2.0 * dq);
}

std::pair<double, double> transversality_check(const VariationalProblem& problem) {
  const double qs = problem.q_star();
  if (!std::isfinite(qs)) {
    throw UnboundedDomainError("q* is infinite; no endpoint to check");
  }
  const MarketEnv& env = problem.env();
  const PriceScheme& s = problem.scheme();
  const double gap_top =
      perceived_marginal(env.kernel, s, qs) - env.prefs.h_prime(qs) - env.theta1;
  const double markup_top = marginal_price(s, qs) - env.marginal_cost(qs);
  return {gap_top, markup_top};
}

PolishReport polish_piecewise(const MarketEnv& env, int segments,
                              int iterations) {
  if (segments < 2) throw DomainError("polish needs at least two segments");
  // Span the candidate over the profit-optimal quadratic's support.
  const QuadraticOptimum ref = optimal_profit_scheme(env);
  const double q_hi = 1.25 * ref.q_star;

  PiecewiseLinear pwl;
  for (int i = 0; i < segments; ++i) {
    pwl.breakpoints.push_back(q_hi * i / segments);
    // Crude starting tariff: marginal cost plus a flat markup.
    const double mid = q_hi * (i + 0.5) / segments;
    pwl.slopes.push_back(env.marginal_cost(mid) +
                         0.3 * (env.theta1 + env.prefs.h1 - env.c1));
  }

  const auto make_problem = [&](const PiecewiseLinear& candidate) {
    return VariationalProblem(env, PriceScheme{candidate});
  };
  const auto evaluate = [&](const PiecewiseLinear& candidate) -> double {
    try {
      return make_problem(candidate).objective(1e-9);
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  const auto max_residual = [&](const PiecewiseLinear& candidate) {
    VariationalProblem problem = make_problem(candidate);
    const double qs = std::min(problem.q_star(), q_hi);
    double worst = 0.0;
    for (int i = 0; i < segments; ++i) {
      const double mid = q_hi * (i + 0.5) / segments;
      if (mid >= qs || mid < 1e-6) continue;
      worst = std::max(worst, std::abs(euler_lagrange_residual(problem, mid)));
    }
    return worst;
  };

  PolishReport report;
  double current = evaluate(pwl);
  report.objective_path.push_back(current);
  report.max_residual_path.push_back(max_residual(pwl));

  for (int it = 0; it < iterations; ++it) {
    // Finite-difference gradient in the slopes.
    std::vector<double> grad(pwl.slopes.size());
    for (std::size_t i = 0; i < pwl.slopes.size(); ++i) {
      const double d = 1e-6 * std::max(1.0, std::abs(pwl.slopes[i]));
      PiecewiseLinear bumped = pwl;
      bumped.slopes[i] += d;
      grad[i] = (evaluate(bumped) - current) / d;
    }
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax < 1e-12) break;

    double eta = 0.25 / gmax;
    bool accepted = false;
    for (int bt = 0; bt < 25; ++bt) {
      PiecewiseLinear trial = pwl;
      for (std::size_t i = 0; i < trial.slopes.size(); ++i) {
        trial.slopes[i] = std::max(0.0, trial.slopes[i] + eta * grad[i]);
      }
      const double value = evaluate(trial);
      if (value > current) {
        pwl = trial;
        current = value;
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) break;
    report.objective_path.push_back(current);
    report.max_residual_path.push_back(max_residual(pwl));
  }
  report.final_scheme = pwl;
  return report;
}

}  // namespace nlpricing
