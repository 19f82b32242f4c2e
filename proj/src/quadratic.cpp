#include "nlpricing/quadratic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "nlpricing/errors.hpp"
#include "nlpricing/quadrature.hpp"

namespace nlpricing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct QuadParams {
  double a1, h1, h2, c1, c2, th0, th1;
};

QuadParams quad_params(const MarketEnv& env) {
  if (!env.prefs.is_quadratic()) {
    throw PreconditionError("quadratic preferences",
                            "closed forms need h(q) = h1 q - (h2/2) q^2");
  }
  return {env.kernel.mean_fraction(), env.prefs.h1, env.prefs.h2,
          env.c1,                     env.c2,       env.theta0,
          env.theta1};
}

void require_prop2(const QuadParams& p) {
  if (!(p.a1 < 2.0 / 3.0)) {
    throw PreconditionError("a1 < 2/3", "bias too large for the profit optimum");
  }
}

// q*(A, B) = (theta1 + h1 - B) / kappa; meaningful only for kappa > 0.
double q_star_of(const QuadParams& p, double A, double B) {
  const double kappa = (1.0 - p.a1) * A + p.h2;
  return (p.th1 + p.h1 - B) / kappa;
}

}  // namespace

double quadratic_profit_closed(const MarketEnv& env, double A, double B) {
  const QuadParams p = quad_params(env);
  const double kappa = (1.0 - p.a1) * A + p.h2;
  if (!(kappa > 0.0)) {
    throw NonmonotoneCutoffError("cutoff slope (1-a1)A + h2 must be positive");
  }
  const double qs = q_star_of(p, A, B);
  if (qs <= 0.0) return 0.0;
  const double top = p.th1 + p.h1 - B;
  const double markup0 = B - p.c1;
  const double dA = A - p.c2;
  const double value = markup0 * top * qs +
                       (dA * top - markup0 * kappa) * qs * qs / 2.0 -
                       dA * kappa * qs * qs * qs / 3.0;
  return value / (p.th1 - p.th0);
}

double quadratic_welfare_closed(const MarketEnv& env, double A, double B) {
  const QuadParams p = quad_params(env);
  const double kappa = (1.0 - p.a1) * A + p.h2;
  if (!(kappa > 0.0)) {
    throw NonmonotoneCutoffError("cutoff slope (1-a1)A + h2 must be positive");
  }
  const double qs = q_star_of(p, A, B);
  if (qs <= 0.0) return 0.0;
  const double top = p.th1 + p.h1 - B;
  const double markup0 = B - p.c1;
  const double wslope = 2.0 * (1.0 - p.a1) * A + p.h2 - p.c2;
  const double value = markup0 * top * qs +
                       (wslope * top - markup0 * kappa) * qs * qs / 2.0 -
                       wslope * kappa * qs * qs * qs / 3.0;
  return value / (p.th1 - p.th0);
}

QuadraticOptimum optimal_profit_scheme(const MarketEnv& env) {
  const QuadParams p = quad_params(env);
  require_prop2(p);
  const double a1 = p.a1;
  const double A = ((1.0 - a1) * p.c2 + (3.0 * a1 - 1.0) * p.h2) /
                   ((1.0 - a1) * (2.0 - 3.0 * a1));
  const double B =
      ((1.0 - 2.0 * a1) * (p.th1 + p.h1) + (1.0 - a1) * p.c1) / (2.0 - 3.0 * a1);
  const double gain = p.th1 + p.h1 - p.c1;
  const double q_star = (1.0 - a1) * gain / ((1.0 - a1) * p.c2 + p.h2);
  const double value = (1.0 - a1) * (1.0 - a1) * gain * gain * gain /
                       (6.0 * (p.th1 - p.th0) * (2.0 - 3.0 * a1) *
                        ((1.0 - a1) * p.c2 + p.h2));
  return {A, B, q_star, value, Objective::profit};
}

QuadraticOptimum optimal_welfare_scheme(const MarketEnv& env) {
  const QuadParams p = quad_params(env);
  if (!(p.a1 < 1.0)) {
    throw PreconditionError("a1 < 1", "bias too large for the welfare optimum");
  }
  const double A = p.c2 / (1.0 - p.a1);
  const double B = p.c1;
  const double gain = p.th1 + p.h1 - p.c1;
  const double q_star = gain / (p.c2 + p.h2);
  const double value =
      gain * gain * gain / (6.0 * (p.th1 - p.th0) * (p.c2 + p.h2));
  return {A, B, q_star, value, Objective::welfare};
}

namespace {

void require_nondegenerate(const QuadParams& p, double A, double B) {
  const double kappa = (1.0 - p.a1) * A + p.h2;
  if (!(kappa > 0.0) || !(q_star_of(p, A, B) > 0.0)) {
    throw DegenerateSchemeError("FOC residuals need q* > 0");
  }
}

}  // namespace

std::pair<double, double> profit_foc_residuals(const MarketEnv& env, double A,
                                               double B) {
  const QuadParams p = quad_params(env);
  require_nondegenerate(p, A, B);
  const double kappa = (1.0 - p.a1) * A + p.h2;
  const double top = p.th1 + p.h1 - B;
  const double markup0 = B - p.c1;
  const double r1 = top * (p.c2 + p.h2 - p.a1 * A) - 2.0 * markup0 * kappa;
  const double r2 =
      top * (-(1.0 - p.a1) * A + p.h2 + 2.0 * p.c2 * (1.0 - p.a1)) -
      3.0 * (1.0 - p.a1) * markup0 * kappa;
  return {r1, r2};
}

std::pair<double, double> profit_foc_residuals_quadrature(const MarketEnv& env,
                                                          double A, double B) {
  const QuadParams p = quad_params(env);
  require_nondegenerate(p, A, B);
  const double kappa = (1.0 - p.a1) * A + p.h2;
  const double qs = q_star_of(p, A, B);
  const double span = p.th1 - p.th0;
  // Raw Leibniz-rule derivatives of the profit integral in (A, B), with the
  // affine survival term and constant type density.
  const auto survival = [&](double q) {
    return (p.th1 + p.h1 - B - kappa * q) / span;
  };
  const auto markup = [&](double q) { return (A - p.c2) * q + B - p.c1; };
  const double leib_A = integrate(
      [&](double q) {
        return q * (survival(q) - (1.0 - p.a1) * markup(q) / span);
      },
      0.0, qs, {1e-12, 48});
  const double leib_B = integrate(
      [&](double q) { return survival(q) - markup(q) / span; }, 0.0, qs,
      {1e-12, 48});
  // Rescale to the reduced forms: r1 matches the B-derivative, r2 the
  // A-derivative.
  const double r1 = 2.0 * kappa * span * leib_B / qs;
  const double r2 = 6.0 * kappa * span * leib_A / (qs * qs);
  return {r1, r2};
}

std::pair<double, double> welfare_foc_residuals(const MarketEnv& env, double A,
                                                double B) {
  const QuadParams p = quad_params(env);
  require_nondegenerate(p, A, B);
  const double kappa = (1.0 - p.a1) * A + p.h2;
  const double top = p.th1 + p.h1 - B;
  const double markup0 = B - p.c1;
  const double core = p.c2 - (1.0 - p.a1) * A;
  return {2.0 * top * core - 3.0 * markup0 * kappa,
          top * core - 2.0 * markup0 * kappa};
}

std::pair<double, double> welfare_foc_residuals_quadrature(const MarketEnv& env,
                                                           double A, double B) {
  const QuadParams p = quad_params(env);
  require_nondegenerate(p, A, B);
  const double kappa = (1.0 - p.a1) * A + p.h2;
  const double qs = q_star_of(p, A, B);
  const double wslope = 2.0 * (1.0 - p.a1) * A + p.h2 - p.c2;
  const auto top_term = [&](double q) { return p.th1 + p.h1 - B - kappa * q; };
  const double IA = integrate(
      [&](double q) {
        return q * (2.0 * top_term(q) - (wslope * q + B - p.c1));
      },
      0.0, qs, {1e-12, 48});
  const double IB = integrate(
      [&](double q) { return top_term(q) - (wslope * q + B - p.c1); }, 0.0, qs,
      {1e-12, 48});
  return {6.0 * kappa * IA / (qs * qs), 2.0 * kappa * IB / qs};
}

double quadratic_objective(const MarketEnv& env, Objective objective, double A,
                           double B) {
  const QuadParams p = quad_params(env);
  const double kappa = (1.0 - p.a1) * A + p.h2;
  if (!(kappa > 1e-12)) return -kInf;  // cutoff map not increasing
  const double qs = q_star_of(p, A, B);
  if (qs <= 0.0) return 0.0;  // zero trade
  const double span = p.th1 - p.th0;
  const double slope =
      objective == Objective::profit ? A - p.c2 : 2.0 * (1.0 - p.a1) * A + p.h2 - p.c2;
  const auto integrand = [&](double q) {
    return (slope * q + B - p.c1) * (p.th1 + p.h1 - B - kappa * q) / span;
  };
  return integrate(integrand, 0.0, qs, {1e-12, 48});
}

namespace {

struct Point {
  double A, B, f;
};

// Nelder-Mead polish (maximization), free to leave the starting box.
Point nelder_mead(const MarketEnv& env, Objective objective, Point start,
                  double dA, double dB, int max_evals) {
  int evals = 0;
  const auto eval = [&](double A, double B) -> Point {
    ++evals;
    return {A, B, quadratic_objective(env, objective, A, B)};
  };
  std::array<Point, 3> s = {start, eval(start.A + dA, start.B),
                            eval(start.A, start.B + dB)};
  const auto order = [&] {
    std::sort(s.begin(), s.end(),
              [](const Point& a, const Point& b) { return a.f > b.f; });
  };
  order();
  while (evals < max_evals) {
    const double diam = std::max(
        {std::abs(s[0].A - s[1].A), std::abs(s[0].A - s[2].A),
         std::abs(s[0].B - s[1].B), std::abs(s[0].B - s[2].B)});
    const double scale =
        1.0 + std::max(std::abs(s[0].A), std::abs(s[0].B));
    if (diam < 1e-11 * scale) break;

    const double cA = 0.5 * (s[0].A + s[1].A);
    const double cB = 0.5 * (s[0].B + s[1].B);
    const Point refl = eval(cA + (cA - s[2].A), cB + (cB - s[2].B));
    if (refl.f > s[0].f) {
      const Point expd = eval(cA + 2.0 * (cA - s[2].A), cB + 2.0 * (cB - s[2].B));
      s[2] = expd.f > refl.f ? expd : refl;
    } else if (refl.f > s[1].f) {
      s[2] = refl;
    } else {
      const Point base = refl.f > s[2].f ? refl : s[2];
      const Point contr = eval(cA + 0.5 * (base.A - cA), cB + 0.5 * (base.B - cB));
      if (contr.f > base.f) {
        s[2] = contr;
      } else {  // shrink toward the best vertex
        s[1] = eval(s[0].A + 0.5 * (s[1].A - s[0].A),
                    s[0].B + 0.5 * (s[1].B - s[0].B));
        s[2] = eval(s[0].A + 0.5 * (s[2].A - s[0].A),
                    s[0].B + 0.5 * (s[2].B - s[0].B));
      }
    }
    order();
  }
  return s[0];
}

}  // namespace

QuadraticOptimum numeric_quadratic_search(const MarketEnv& env,
                                          Objective objective,
                                          const SearchOptions& opt) {
  const QuadParams p = quad_params(env);
  const double A_half = opt.box_scale_A * (p.c2 + p.h2);
  const double B_lo = -(p.th1 + p.h1);
  const double B_hi = 2.0 * (p.th1 + p.h1);
  const int n = opt.grid_n;

  std::vector<double> values(static_cast<std::size_t>(n) * n);
  parallel_for(values.size(), opt.exec, [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / n;
    const int j = static_cast<int>(idx) % n;
    const double A = -A_half + 2.0 * A_half * i / (n - 1);
    const double B = B_lo + (B_hi - B_lo) * j / (n - 1);
    values[idx] = quadratic_objective(env, objective, A, B);
  });
  std::size_t best_idx = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best_idx]) best_idx = k;
  }
  const int bi = static_cast<int>(best_idx) / n;
  const int bj = static_cast<int>(best_idx) % n;
  Point start = {-A_half + 2.0 * A_half * bi / (n - 1),
                 B_lo + (B_hi - B_lo) * bj / (n - 1), values[best_idx]};

  const double dA = 0.7 * 2.0 * A_half / (n - 1);
  const double dB = 0.7 * (B_hi - B_lo) / (n - 1);
  const Point best =
      nelder_mead(env, objective, start, dA, dB, opt.max_polish_evals);

  QuadraticOptimum result;
  result.A = best.A;
  result.B = best.B;
  result.objective = objective;
  result.value = best.f;
  const double kappa = (1.0 - p.a1) * best.A + p.h2;
  result.q_star = kappa > 0.0 ? std::max(0.0, q_star_of(p, best.A, best.B)) : 0.0;

  // Guard: a positive closed-form optimum must not be missed entirely.
  const bool closed_ok = objective == Objective::profit ? p.a1 < 2.0 / 3.0
                                                        : p.a1 < 1.0;
  if (closed_ok) {
    const QuadraticOptimum closed = objective == Objective::profit
                                        ? optimal_profit_scheme(env)
                                        : optimal_welfare_scheme(env);
    if (closed.value > 0.0 && !(result.value > 0.0)) {
      throw OracleDisagreementError(
          "numeric search found no positive value where the closed form is positive");
    }
  }
  return result;
}

double profit_welfare_ratio(const MarketEnv& env) {
  const QuadParams p = quad_params(env);
  require_prop2(p);
  const double one = 1.0 - p.a1;
  return one * one * (p.c2 + p.h2) /
         ((2.0 - 3.0 * p.a1) * (one * p.c2 + p.h2));
}

}  // namespace nlpricing
