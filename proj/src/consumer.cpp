#include "nlpricing/consumer.hpp"

#include <cmath>

#include "nlpricing/errors.hpp"
#include "nlpricing/roots.hpp"

namespace nlpricing {

void validate(const Preferences& prefs, double q_hi) {
  if (prefs.is_quadratic()) {
    if (prefs.h1 < 0.0 || prefs.h2 < 0.0) {
      throw DomainError("quadratic preference coefficients must be nonnegative");
    }
    return;
  }
  if (!prefs.h_custom || !prefs.h_prime_custom) {
    throw DomainError("custom preferences need both h and h'");
  }
  if (std::abs(prefs.h(0.0)) > 1e-12) {
    throw DomainError("custom h must satisfy h(0) = 0");
  }
  // Strict concavity on a sample grid: h' decreasing.
  const int n = 64;
  double prev = prefs.h_prime(0.0);
  for (int i = 1; i <= n; ++i) {
    const double q = q_hi * i / n;
    const double cur = prefs.h_prime(q);
    if (cur >= prev) {
      throw DomainError("custom h is not strictly concave on the sample grid");
    }
    prev = cur;
  }
}

double marginal_utility(const Preferences& prefs, double q, double theta) {
  if (q < 0.0 || std::isnan(q)) {
    throw DomainError("quantity must be nonnegative");
  }
  return theta + prefs.h_prime(q);
}

namespace {

// theta_P(q) = perceived(q) - h'(q), the valuation indifferent at q.
double cutoff(const Preferences& prefs, const PerceptionKernel& kernel,
              const PriceScheme& scheme, double q) {
  return perceived_marginal(kernel, scheme, q) - prefs.h_prime(q);
}

void check_monotone_grid(const Preferences& prefs,
                         const PerceptionKernel& kernel,
                         const PriceScheme& scheme, double hi, int n) {
  double prev = cutoff(prefs, kernel, scheme, 0.0);
  double scale = std::max(1.0, std::abs(prev));
  for (int i = 1; i <= n; ++i) {
    const double q = hi * i / n;
    const double cur = cutoff(prefs, kernel, scheme, q);
    scale = std::max(scale, std::abs(cur));
    if (cur < prev - 1e-9 * scale) {
      throw NonmonotoneCutoffError("cutoff map is not nondecreasing on [0, bracket]");
    }
    prev = cur;
  }
}

}  // namespace

double best_response(const Preferences& prefs, const PerceptionKernel& kernel,
                     const PriceScheme& scheme, double theta,
                     const BestResponseOptions& opt) {
  // Corner: no profitable first unit.
  if (theta <= cutoff(prefs, kernel, scheme, 0.0)) return 0.0;

  // Bracket by doubling until the cutoff reaches theta.
  double hi = 1.0;
  while (cutoff(prefs, kernel, scheme, hi) < theta) {
    hi *= 2.0;
    if (hi > opt.q_cap) {
      throw UnboundedDemandError("no quantity below the cap brackets the consumer FOC");
    }
  }
  if (opt.check_monotone) {
    check_monotone_grid(prefs, kernel, scheme, hi, opt.monotone_grid);
  }
  const double q = bisect_threshold(
      [&](double x) { return cutoff(prefs, kernel, scheme, x) >= theta; }, 0.0,
      hi, 1e-13 * std::max(1.0, hi));

  // At smooth crossings the FOC residual meets f_tol; at a bunching kink the
  // residual is the gap between the one-sided perceived prices, which is the
  // intended fixed point of the adjustment rule.
  (void)opt.f_tol;
  return q;
}

DynamicsResult simulate_dynamics(const Preferences& prefs,
                                 const PerceptionKernel& kernel,
                                 const PriceScheme& scheme, double theta,
                                 double q0, double gain, double step,
                                 int max_steps) {
  if (!(q0 > 0.0)) throw DomainError("dynamics must start from q0 > 0");
  if (!(gain > 0.0) || !(step > 0.0)) {
    throw DomainError("gain and step must be positive");
  }
  DynamicsResult result;
  double q = q0;
  for (int t = 0; t < max_steps; ++t) {
    const double drift = marginal_utility(prefs, q, theta) -
                         perceived_marginal(kernel, scheme, q);
    result.trajectory.push_back({t, q, drift});
    double next = q + step * gain * drift;
    if (next < 0.0) next = 0.0;
    if (std::abs(next - q) < 1e-10) {
      const double drift_next = marginal_utility(prefs, next, theta) -
                                perceived_marginal(kernel, scheme, next);
      result.trajectory.push_back({t + 1, next, drift_next});
      result.converged = true;
      return result;
    }
    q = next;
  }
  result.converged = false;
  return result;
}

}  // namespace nlpricing
