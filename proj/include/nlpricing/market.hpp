#pragma once

#include <limits>

#include "nlpricing/consumer.hpp"
#include "nlpricing/perception.hpp"
#include "nlpricing/tariffs.hpp"

namespace nlpricing {

// Which cutoff-type map to use: the perceived map of the environment's
// kernel, the rational map P' - h', or the average-price map P/q - h'.
enum class CutoffMode { perceived, rational, average };

// Market environment: quadratic-or-general preferences, convex quadratic
// cost C(q) = c1 q + (c2/2) q^2, uniform types on [theta0, theta1], and the
// population's perception kernel.
struct MarketEnv {
  Preferences prefs;
  double c1 = 0.0;
  double c2 = 0.0;
  double theta0 = 0.0;
  double theta1 = 1.0;
  PerceptionKernel kernel = PerceptionKernel::dirac0();

  // Proposition-validity flags filled at construction.
  bool prop2_valid = false;  // a1 < 2/3
  bool prop3_valid = false;  // a1 < 1

  static MarketEnv make(Preferences prefs, double c1, double c2, double theta0,
                        double theta1, PerceptionKernel kernel);

  double cost(double q) const { return c1 * q + 0.5 * c2 * q * q; }
  double marginal_cost(double q) const { return c1 + c2 * q; }

  // Uniform type distribution on [theta0, theta1] (clamped CDF).
  double type_cdf(double theta) const;
  double type_density(double theta) const;

  // Search cap for quantities; beyond it q* is treated as infinite.
  double q_cap() const;
};

// The map q -> theta_P(q) for one of the three modes, with a verified
// monotonicity verdict on a 1024-point grid over [0, q_cap] and the cached
// maximum quantity q*. q_star() is +infinity (sentinel) when the cutoff
// stays below theta1 up to the cap.
class CutoffMap {
 public:
  CutoffMap(const MarketEnv& env, const PriceScheme& scheme, CutoffMode mode);

  double operator()(double q) const;
  bool increasing() const { return increasing_; }
  double q_star() const { return q_star_; }

  // Require monotonicity, throwing NonmonotoneCutoffError otherwise.
  void require_increasing() const;

 private:
  const MarketEnv* env_;
  const PriceScheme* scheme_;
  CutoffMode mode_;
  bool increasing_ = false;
  double q_star_ = std::numeric_limits<double>::infinity();
};

double cutoff_type(const MarketEnv& env, const PriceScheme& scheme, double q,
                   CutoffMode mode);

// Smallest q with cutoff >= theta1 (bisection), or +infinity sentinel when
// the cutoff stays below theta1 up to the cap.
// Throws NonmonotoneCutoffError if the cutoff map is not increasing.
double max_quantity(const MarketEnv& env, const PriceScheme& scheme,
                    CutoffMode mode);

// Expected monopoly profit per consumer,
//   integral over [0, q*] of (P' - C') (1 - F(theta_P)) dq.
// Quadratic schemes in the exact regime (theta_P(0) >= theta0) use the
// closed polynomial antiderivative; everything else goes through adaptive
// quadrature with kinks as panel boundaries.
double expected_profit(const MarketEnv& env, const PriceScheme& scheme);

// Always-quadrature route (clamped CDF), for cross-checks.
double expected_profit_quadrature(const MarketEnv& env,
                                  const PriceScheme& scheme);

// Type-space route E_theta[P(q(theta)) - C(q(theta))] with per-type best
// responses; the independent oracle for expected_profit.
double expected_profit_typespace(const MarketEnv& env,
                                 const PriceScheme& scheme);

// Expected total welfare,
//   integral of [ (dperceived/dq - h'') q + perceived - C' ] (1 - F) dq.
// Dispatches to the closed form (quadratic, exact regime), the q-space
// quadrature (continuous perceived marginal), or the type-space integral
// (kinked perceived marginal, where bunching makes q-space ill-defined).
double expected_welfare(const MarketEnv& env, const PriceScheme& scheme);

// q-space quadrature route; requires a continuous perceived marginal price
// on (0, q*) and throws KinkError otherwise.
double expected_welfare_quadrature(const MarketEnv& env,
                                   const PriceScheme& scheme);

// Type-space route E_theta[theta q + h(q) - C(q)] at per-type best responses.
double expected_welfare_typespace(const MarketEnv& env,
                                  const PriceScheme& scheme);

// CS = W - pi.
double consumer_surplus(const MarketEnv& env, const PriceScheme& scheme);

// Aggregate consumption of a mixed population: fraction lambda responds to
// the average price, 1 - lambda to the true marginal price. Integrates
// per-type best responses over theta, with exact plateau segments for the
// types bunched at tariff kinks.
double aggregate_consumption(const MarketEnv& env, const PriceScheme& scheme,
                             double lambda);

// Mean best-response quantity over the type distribution for one cutoff
// mode (the lambda = 0 / lambda = 1 components of aggregate_consumption).
double mean_quantity(const MarketEnv& env, const PriceScheme& scheme,
                     CutoffMode mode);

}  // namespace nlpricing
