#include "nlpricing/market.hpp"

#include <algorithm>
#include <cmath>

#include "nlpricing/errors.hpp"
#include "nlpricing/quadratic.hpp"
#include "nlpricing/quadrature.hpp"
#include "nlpricing/roots.hpp"

namespace nlpricing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Left derivative of P at q (marginal_price returns the right one).
double left_marginal(const PriceScheme& scheme, double q) {
  if (const auto* tt = std::get_if<TwoTier>(&scheme)) {
    return q <= tt->qbar ? tt->p2 : tt->p3;
  }
  if (const auto* pwl = std::get_if<PiecewiseLinear>(&scheme)) {
    std::size_t i = 0;
    while (i + 1 < pwl->breakpoints.size() && q > pwl->breakpoints[i + 1]) ++i;
    return pwl->slopes[i];
  }
  return marginal_price(scheme, q);
}

// Curvature P''(q) away from kinks.
double curvature(const PriceScheme& scheme) {
  if (const auto* qd = std::get_if<Quadratic>(&scheme)) return qd->A;
  return 0.0;
}

double h_second(const Preferences& prefs, double q) {
  if (prefs.is_quadratic()) return -prefs.h2;
  const double d = 1e-6 * std::max(1.0, std::abs(q));
  return (prefs.h_prime(q + d) - prefs.h_prime(std::max(0.0, q - d))) /
         (d + std::min(q, d));
}

// Quantities in (0, hi) where the perceived marginal price jumps: images of
// the tariff kinks under the kernel atoms sitting strictly below eps = q.
std::vector<double> perceived_jump_points(const PerceptionKernel& kernel,
                                          const PriceScheme& scheme,
                                          double hi) {
  std::vector<double> jumps;
  for (double k : kink_points(scheme)) {
    for (const auto& a : kernel.atoms()) {
      if (a.weight <= 0.0 || a.frac >= 1.0) continue;
      const double q = k / (1.0 - a.frac);
      if (q > 0.0 && q < hi) jumps.push_back(q);
    }
  }
  std::sort(jumps.begin(), jumps.end());
  jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());
  return jumps;
}

double mode_cutoff(const MarketEnv& env, const PriceScheme& scheme, double q,
                   CutoffMode mode) {
  switch (mode) {
    case CutoffMode::perceived:
      return perceived_marginal(env.kernel, scheme, q) - env.prefs.h_prime(q);
    case CutoffMode::rational:
      return marginal_price(scheme, q) - env.prefs.h_prime(q);
    case CutoffMode::average:
      return average_price(scheme, q) - env.prefs.h_prime(q);
  }
  return 0.0;
}

}  // namespace

MarketEnv MarketEnv::make(Preferences prefs, double c1, double c2,
                          double theta0, double theta1,
                          PerceptionKernel kernel) {
  validate(prefs);
  if (c1 < 0.0 || c2 < 0.0) {
    throw PreconditionError("h1, c1, c2, h2 >= 0", "cost coefficients must be nonnegative");
  }
  if (!(theta1 > theta0) || theta0 < 0.0) {
    throw PreconditionError("theta1 > theta0 >= 0", "invalid type range");
  }
  if (prefs.is_quadratic()) {
    if (!(c2 + prefs.h2 > 0.0)) {
      throw PreconditionError("c2 + h2 > 0", "cost and utility curvature both vanish");
    }
    if (!(theta1 + prefs.h1 - c1 > 0.0)) {
      throw PreconditionError("theta1 + h1 - c1 > 0", "no type values the first unit above marginal cost");
    }
  }
  MarketEnv env;
  env.prefs = std::move(prefs);
  env.c1 = c1;
  env.c2 = c2;
  env.theta0 = theta0;
  env.theta1 = theta1;
  env.kernel = std::move(kernel);
  const double a1 = env.kernel.mean_fraction();
  env.prop2_valid = a1 < 2.0 / 3.0;
  env.prop3_valid = a1 < 1.0;
  return env;
}

double MarketEnv::type_cdf(double theta) const {
  const double t = (theta - theta0) / (theta1 - theta0);
  return std::clamp(t, 0.0, 1.0);
}

double MarketEnv::type_density(double theta) const {
  if (theta < theta0 || theta > theta1) return 0.0;
  return 1.0 / (theta1 - theta0);
}

double MarketEnv::q_cap() const {
  const double scale = c2 + (prefs.is_quadratic() ? prefs.h2 : 0.0);
  return 10.0 * (theta1 + prefs.h1 + 1.0) / std::max(1e-9, scale);
}

CutoffMap::CutoffMap(const MarketEnv& env, const PriceScheme& scheme,
                     CutoffMode mode)
    : env_(&env), scheme_(&scheme), mode_(mode) {
  const double cap = env.q_cap();
  const int n = 1024;
  increasing_ = true;
  double prev = mode_cutoff(env, scheme, 0.0, mode);
  double scale = std::max(1.0, std::abs(prev));
  for (int i = 1; i <= n; ++i) {
    const double q = cap * i / n;
    const double cur = mode_cutoff(env, scheme, q, mode);
    scale = std::max(scale, std::abs(cur));
    if (cur < prev - 1e-9 * scale) {
      increasing_ = false;
      break;
    }
    prev = cur;
  }
  if (!increasing_) return;

  if (mode_cutoff(env, scheme, 0.0, mode) >= env.theta1) {
    q_star_ = 0.0;
  } else if (mode_cutoff(env, scheme, cap, mode) < env.theta1) {
    q_star_ = kInf;  // cutoff never reaches the top type below the cap
  } else {
    q_star_ = bisect_threshold(
        [&](double q) { return mode_cutoff(env, scheme, q, mode) >= env.theta1; },
        0.0, cap, 1e-12 * std::max(1.0, cap));
  }
}

double CutoffMap::operator()(double q) const {
  return mode_cutoff(*env_, *scheme_, q, mode_);
}

void CutoffMap::require_increasing() const {
  if (!increasing_) {
    throw NonmonotoneCutoffError("cutoff map is not nondecreasing on [0, q_cap]");
  }
}

double cutoff_type(const MarketEnv& env, const PriceScheme& scheme, double q,
                   CutoffMode mode) {
  if (q < 0.0 || std::isnan(q)) {
    throw DomainError("quantity must be nonnegative");
  }
  return mode_cutoff(env, scheme, q, mode);
}

double max_quantity(const MarketEnv& env, const PriceScheme& scheme,
                    CutoffMode mode) {
  CutoffMap map(env, scheme, mode);
  map.require_increasing();
  return map.q_star();
}

namespace {

// Shared setup for the q-space functionals.
struct QSpace {
  CutoffMap map;
  double q_star;
  std::vector<double> panels;  // kinks, perceived jumps, clamp boundary

  QSpace(const MarketEnv& env, const PriceScheme& scheme)
      : map(env, scheme, CutoffMode::perceived) {
    map.require_increasing();
    q_star = map.q_star();
    if (!std::isfinite(q_star)) {
      throw UnboundedDomainError("q* is infinite; functional has no finite integration domain");
    }
    for (double k : kink_points(scheme)) {
      if (k > 0.0 && k < q_star) panels.push_back(k);
    }
    for (double j : perceived_jump_points(env.kernel, scheme, q_star)) {
      panels.push_back(j);
    }
    // Where the survival term stops being clamped at 1.
    if (map(0.0) < env.theta0 && map(q_star) > env.theta0) {
      panels.push_back(bisect_threshold(
          [&](double q) { return map(q) >= env.theta0; }, 0.0, q_star,
          1e-13 * std::max(1.0, q_star)));
    }
    std::sort(panels.begin(), panels.end());
  }
};

bool closed_form_applies(const MarketEnv& env, const PriceScheme& scheme) {
  const auto* qd = std::get_if<Quadratic>(&scheme);
  if (qd == nullptr || !env.prefs.is_quadratic()) return false;
  const double a1 = env.kernel.mean_fraction();
  const double kappa = (1.0 - a1) * qd->A + env.prefs.h2;
  if (!(kappa > 0.0)) return false;
  // Exact regime: the survival term is never clamped on (0, q*).
  return qd->B - env.prefs.h1 >= env.theta0 - 1e-12;
}

}  // namespace

double expected_profit_quadrature(const MarketEnv& env,
                                  const PriceScheme& scheme) {
  QSpace qs(env, scheme);
  if (qs.q_star == 0.0) return 0.0;
  const auto integrand = [&](double q) {
    return (marginal_price(scheme, q) - env.marginal_cost(q)) *
           (1.0 - env.type_cdf(qs.map(q)));
  };
  return integrate_with_panels(integrand, 0.0, qs.q_star, qs.panels,
                               {1e-10, 48});
}

double expected_profit(const MarketEnv& env, const PriceScheme& scheme) {
  if (closed_form_applies(env, scheme)) {
    const auto& qd = std::get<Quadratic>(scheme);
    return quadratic_profit_closed(env, qd.A, qd.B);
  }
  return expected_profit_quadrature(env, scheme);
}

namespace {

// Type-space integration shared by the profit/welfare oracle routes and
// aggregate consumption. Integrates fn(theta, q(theta)) over the types that
// consume a positive quantity, with exact plateau handling at cutoff jumps.
double integrate_over_types(const MarketEnv& env, const PriceScheme& scheme,
                            CutoffMode mode,
                            const std::function<double(double, double)>& fn,
                            double abs_tol) {
  CutoffMap map(env, scheme, mode);
  map.require_increasing();
  const double q_star = map.q_star();
  if (!std::isfinite(q_star)) {
    throw UnboundedDomainError("q* is infinite; type-space integral unbounded");
  }
  const double theta_floor = std::max(env.theta0, map(0.0));
  if (theta_floor >= env.theta1 || q_star == 0.0) return 0.0;

  // Jump locations of the cutoff map (kinks seen by this mode).
  std::vector<double> jump_qs;
  if (mode == CutoffMode::rational || mode == CutoffMode::perceived) {
    for (double j : mode == CutoffMode::rational
                        ? kink_points(scheme)
                        : perceived_jump_points(env.kernel, scheme, q_star)) {
      if (j > 0.0 && j < q_star) jump_qs.push_back(j);
    }
  }
  std::sort(jump_qs.begin(), jump_qs.end());

  // One-sided cutoff values at a jump location.
  const auto cutoff_left = [&](double q) -> double {
    if (mode == CutoffMode::rational) {
      return left_marginal(scheme, q) - env.prefs.h_prime(q);
    }
    const double eps = 1e-9 * std::max(1.0, q);
    return map(q - eps);
  };

  double total = 0.0;
  double seg_qlo = 0.0;
  double seg_thlo = theta_floor;
  const int npieces = static_cast<int>(jump_qs.size()) + 1;

  const auto add_smooth = [&](double qlo, double qhi, double thlo,
                              double thhi) {
    const double lo = std::max(thlo, theta_floor);
    const double hi = std::min(thhi, env.theta1);
    if (hi <= lo) return;
    const auto q_of_theta = [&](double theta) {
      return bisect_threshold([&](double q) { return map(q) >= theta; }, qlo,
                              qhi, 1e-12 * std::max(1.0, qhi));
    };
    total += integrate(
        [&](double theta) { return fn(theta, q_of_theta(theta)); }, lo, hi,
        {abs_tol / npieces, 40});
  };

  for (double j : jump_qs) {
    const double th_left = cutoff_left(j);
    add_smooth(seg_qlo, j, seg_thlo, th_left);
    // Bunched types: everyone in the jump interval consumes exactly j.
    const double lo = std::max(th_left, theta_floor);
    const double hi = std::min(map(j), env.theta1);
    if (hi > lo) {
      total += integrate([&](double theta) { return fn(theta, j); }, lo, hi,
                         {abs_tol / npieces, 40});
    }
    seg_qlo = j;
    seg_thlo = map(j);
  }
  add_smooth(seg_qlo, q_star, seg_thlo, env.theta1);
  return total / (env.theta1 - env.theta0);
}

}  // namespace

double expected_profit_typespace(const MarketEnv& env,
                                 const PriceScheme& scheme) {
  return integrate_over_types(
      env, scheme, CutoffMode::perceived,
      [&](double, double q) { return price(scheme, q) - env.cost(q); }, 1e-10);
}

double expected_welfare_typespace(const MarketEnv& env,
                                  const PriceScheme& scheme) {
  return integrate_over_types(
      env, scheme, CutoffMode::perceived,
      [&](double theta, double q) {
        return theta * q + env.prefs.h(q) - env.cost(q);
      },
      1e-10);
}

double expected_welfare_quadrature(const MarketEnv& env,
                                   const PriceScheme& scheme) {
  QSpace qs(env, scheme);
  if (qs.q_star == 0.0) return 0.0;
  if (!perceived_jump_points(env.kernel, scheme, qs.q_star).empty()) {
    throw KinkError("perceived marginal price jumps inside (0, q*); q-space welfare integrand is not defined through the atom");
  }
  const double w_uniform = env.kernel.uniform_weight();
  double atom_slope_weight = 0.0;  // sum w_i (1 - f_i), the P'' carry-through
  for (const auto& a : env.kernel.atoms()) {
    atom_slope_weight += a.weight * (1.0 - a.frac);
  }
  const double curv = curvature(scheme);
  const auto integrand = [&](double q) {
    // d(perceived)/dq: atoms propagate P'' at their evaluation point, the
    // uniform component differentiates the average price.
    double dperc = atom_slope_weight * curv;
    if (w_uniform > 0.0 && q > 0.0) {
      dperc += w_uniform *
               (marginal_price(scheme, q) - average_price(scheme, q)) / q;
    } else if (w_uniform > 0.0) {
      dperc += w_uniform * 0.5 * curv;  // limit of (P' - P/q)/q at 0
    }
    const double perc = perceived_marginal(env.kernel, scheme, q);
    const double term =
        (dperc - h_second(env.prefs, q)) * q + perc - env.marginal_cost(q);
    return term * (1.0 - env.type_cdf(qs.map(q)));
  };
  return integrate_with_panels(integrand, 0.0, qs.q_star, qs.panels,
                               {1e-10, 48});
}

double expected_welfare(const MarketEnv& env, const PriceScheme& scheme) {
  if (closed_form_applies(env, scheme)) {
    const auto& qd = std::get<Quadratic>(scheme);
    return quadratic_welfare_closed(env, qd.A, qd.B);
  }
  QSpace probe(env, scheme);
  if (perceived_jump_points(env.kernel, scheme, probe.q_star).empty()) {
    return expected_welfare_quadrature(env, scheme);
  }
  return expected_welfare_typespace(env, scheme);
}

double consumer_surplus(const MarketEnv& env, const PriceScheme& scheme) {
  return expected_welfare(env, scheme) - expected_profit(env, scheme);
}

double mean_quantity(const MarketEnv& env, const PriceScheme& scheme,
                     CutoffMode mode) {
  return integrate_over_types(
      env, scheme, mode, [](double, double q) { return q; }, 1e-8);
}

double aggregate_consumption(const MarketEnv& env, const PriceScheme& scheme,
                             double lambda) {
  if (lambda < 0.0 || lambda > 1.0) {
    throw DomainError("population fraction lambda must lie in [0, 1]");
  }
  double q = 0.0;
  if (lambda < 1.0) {
    q += (1.0 - lambda) * mean_quantity(env, scheme, CutoffMode::rational);
  }
  if (lambda > 0.0) {
    q += lambda * mean_quantity(env, scheme, CutoffMode::average);
  }
  return q;
}

}  // namespace nlpricing
