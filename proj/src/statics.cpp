#include "nlpricing/statics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nlpricing/errors.hpp"
#include "nlpricing/quadratic.hpp"

namespace nlpricing {

namespace {

void require_domain(double a1, double p) {
  if (!(a1 >= 0.0) || !(a1 < 2.0 / 3.0)) {
    throw DomainError("a1 must lie in [0, 2/3)");
  }
  if (!(p >= 0.0)) throw DomainError("p must be nonnegative");
}

// Raw evaluations without the domain gate (finite differences may step
// slightly outside; the rational expressions extend smoothly).
double eval_F(double a1, double p) {
  const double one = 1.0 - a1;
  const double den = (2.0 - 3.0 * a1) * (2.0 - 3.0 * a1) * (one * p + 1.0) *
                     (one * p + 1.0);
  return one * one *
         (3.0 * (1.0 - 2.0 * a1) * (one * p + 1.0) + one * a1 * (p + 3.0)) /
         den;
}

double eval_H(double a1, double p) {
  const double one = 1.0 - a1;
  const double den = (2.0 - 3.0 * a1) * (2.0 - 3.0 * a1) * (one * p + 1.0) *
                     (one * p + 1.0);
  return one * one *
         ((1.0 - 3.0 * a1) * (one * p + 1.0) + a1 * one * (p + 3.0)) / den;
}

double eval_f_aux(double a1, double p) {
  const double a2 = a1 * a1;
  const double a3 = a2 * a1;
  return (a3 - 2.0 * a2 + a1) * p * p + (-5.0 * a2 + 7.0 * a1 - 2.0) * p +
         18.0 * a3 - 24.0 * a2 + 12.0 * a1 - 2.0;
}

// Profit surface component: pi(profit-opt) = K * pi_comp(a1, p).
double eval_pi_comp(double a1, double p) {
  const double one = 1.0 - a1;
  return one * one / ((2.0 - 3.0 * a1) * (one * p + 1.0));
}

double fd_da1(double (*f)(double, double), double a1, double p) {
  const double h = 1e-6;
  return (f(a1 + h, p) - f(a1 - h, p)) / (2.0 * h);
}

Sign sign_of(double v, double tol) {
  if (v > tol) return Sign::positive;
  if (v < -tol) return Sign::negative;
  return Sign::zero;
}

void cross_check_derivative(double analytic, double fd, const char* name) {
  if (std::abs(analytic - fd) > 1e-4 * std::max(1.0, std::abs(analytic))) {
    throw OracleDisagreementError(std::string(name) +
                                  ": printed derivative disagrees with finite difference");
  }
}

}  // namespace

ShapeValues shape_functions(double a1, double p) {
  require_domain(a1, p);
  const double F = eval_F(a1, p);
  return {F, 1.0 / (p + 1.0) - F, eval_H(a1, p), eval_f_aux(a1, p)};
}

double shape_F_da1(double a1, double p) {
  require_domain(a1, p);
  const double a2 = a1 * a1;
  const double a3 = a2 * a1;
  const double num =
      (a1 - 1.0) * ((4.0 * a3 - 10.0 * a2 + 8.0 * a1 - 2.0) * p * p +
                    (-9.0 * a3 + 10.0 * a2 + a1 - 2.0) * p +
                    (18.0 * a3 - 15.0 * a2 + 3.0 * a1));
  const double d1 = 3.0 * a1 - 2.0;
  const double d2 = p * a1 - p - 1.0;
  return num / (d1 * d1 * d1 * d2 * d2 * d2);
}

double shape_H_da1(double a1, double p) {
  require_domain(a1, p);
  const double d1 = 3.0 * a1 - 2.0;
  const double d2 = p * a1 - p - 1.0;
  return (a1 - 1.0) * eval_f_aux(a1, p) / (d1 * d1 * d1 * d2 * d2 * d2);
}

Sign welfare_bias_derivative_sign(double a1, double p) {
  const double analytic = shape_F_da1(a1, p);
  cross_check_derivative(analytic, fd_da1(eval_F, a1, p), "dF/da1");
  if (a1 > 1.0 / 3.0 && a1 < 0.5) return Sign::positive;
  if (a1 > (1.0 + std::sqrt(73.0)) / 18.0) return Sign::negative;
  return Sign::undetermined;  // no claim outside the proposition's regions
}

ProfitBiasSign profit_bias_derivative_sign(double a1, double c2, double h2) {
  if (!(a1 >= 0.0) || !(a1 < 2.0 / 3.0)) {
    throw DomainError("a1 must lie in [0, 2/3)");
  }
  if (!(c2 + h2 > 0.0)) throw DomainError("c2 + h2 must be positive");
  const double expr = c2 * (1.0 - a1) + h2 * (3.0 * a1 - 1.0);
  ProfitBiasSign out;
  out.sign = sign_of(expr, 1e-12 * std::max(1.0, c2 + h2));
  if (h2 > c2) out.minimizer = (h2 - c2) / (3.0 * h2 - c2);
  return out;
}

SurplusBiasSign surplus_bias_derivative_sign(double a1, double p) {
  const double analytic = shape_H_da1(a1, p);
  cross_check_derivative(analytic, fd_da1(eval_H, a1, p), "dH/da1");
  const double bound = std::max((1.0 - p) / (3.0 - p), (p - 1.0) / (p + 1.0));
  if (p <= 1.94 && a1 < bound) return {Sign::positive, true};
  if (a1 > 0.4) return {Sign::negative, true};
  return {sign_of(fd_da1(eval_H, a1, p), 1e-12), false};
}

double efficiency_cost(const MarketEnv& env) {
  const QuadraticOptimum profit_opt = optimal_profit_scheme(env);
  const QuadraticOptimum welfare_opt = optimal_welfare_scheme(env);
  return welfare_opt.value -
         quadratic_welfare_closed(env, profit_opt.A, profit_opt.B);
}

std::vector<SweepRow> sweep(const MarketEnv& env_template,
                            std::span<const double> a1_grid,
                            std::span<const double> p_grid,
                            const SweepOptions& opt) {
  if (!env_template.prefs.is_quadratic() || !(env_template.prefs.h2 > 0.0)) {
    throw DomainError("sweep needs quadratic preferences with h2 > 0");
  }
  const double h1 = env_template.prefs.h1;
  const double h2 = env_template.prefs.h2;
  const double c1 = env_template.c1;
  const double th0 = env_template.theta0;
  const double th1 = env_template.theta1;
  const double gain = th1 + h1 - c1;
  const double K = gain * gain * gain / (6.0 * (th1 - th0) * h2);

  // Validate the whole grid up front so parallel rows cannot throw.
  for (double a1 : a1_grid) {
    for (double p : p_grid) require_domain(a1, p);
  }

  std::vector<SweepRow> rows(a1_grid.size() * p_grid.size());
  parallel_for(rows.size(), opt.exec, [&](std::size_t idx) {
    const double a1 = a1_grid[idx / p_grid.size()];
    const double p = p_grid[idx % p_grid.size()];
    const ShapeValues s = shape_functions(a1, p);
    rows[idx] = {a1,
                 p,
                 s.F,
                 s.G,
                 s.H,
                 K * eval_pi_comp(a1, p),
                 K * s.F,
                 K * s.H,
                 K * s.G};
  });

  // Re-derive a seeded random subset of rows from market quadrature. Only
  // rows where the profit-optimal B keeps the survival term unclamped are
  // exact candidates.
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double a1 = rows[i].a1;
    const double B =
        ((1.0 - 2.0 * a1) * (th1 + h1) + (1.0 - a1) * c1) / (2.0 - 3.0 * a1);
    if (B - h1 >= th0) eligible.push_back(i);
  }
  std::mt19937 rng(opt.seed);
  std::shuffle(eligible.begin(), eligible.end(), rng);
  const std::size_t checks =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(0, opt.cross_checks)),
                            eligible.size());
  for (std::size_t k = 0; k < checks; ++k) {
    const SweepRow& row = rows[eligible[k]];
    Preferences prefs;
    prefs.h1 = h1;
    prefs.h2 = h2;
    MarketEnv env = MarketEnv::make(prefs, c1, row.p * h2, th0, th1,
                                    PerceptionKernel::mix_dirac(row.a1));
    const QuadraticOptimum popt = optimal_profit_scheme(env);
    const PriceScheme scheme = popt.scheme();
    const double pi_q = expected_profit_quadrature(env, scheme);
    const double w_q = expected_welfare_quadrature(env, scheme);
    const auto close = [](double a, double b) {
      return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
    };
    if (!close(pi_q, row.profit) || !close(w_q, row.welfare) ||
        !close(w_q - pi_q, row.surplus) ||
        !close(optimal_welfare_scheme(env).value - w_q, row.efficiency_cost)) {
      throw OracleDisagreementError("sweep closed forms disagree with quadrature cross-check");
    }
  }
  return rows;
}

}  // namespace nlpricing
