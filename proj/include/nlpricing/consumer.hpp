#pragma once

#include <functional>
#include <vector>

#include "nlpricing/perception.hpp"
#include "nlpricing/tariffs.hpp"

namespace nlpricing {

// Consumer gross utility u(q, theta) = q*theta + h(q) with h(0) = 0 and h
// strictly concave. The default is the quadratic h(q) = h1*q - (h2/2)*q^2;
// a general strictly concave h can be supplied through the hooks (then h1/h2
// are ignored).
struct Preferences {
  double h1 = 0.0;
  double h2 = 0.0;

  std::function<double(double)> h_custom;        // h(q), must have h(0) = 0
  std::function<double(double)> h_prime_custom;  // h'(q)

  bool is_quadratic() const { return !h_custom && !h_prime_custom; }

  double h(double q) const {
    if (h_custom) return h_custom(q);
    return h1 * q - 0.5 * h2 * q * q;
  }
  double h_prime(double q) const {
    if (h_prime_custom) return h_prime_custom(q);
    return h1 - h2 * q;
  }
};

// Validates h(0) = 0 and that h' is decreasing on a sample grid over
// [0, q_hi]; throws DomainError otherwise.
void validate(const Preferences& prefs, double q_hi = 10.0);

// u_q(q, theta) = theta + h'(q).
double marginal_utility(const Preferences& prefs, double q, double theta);

struct BestResponseOptions {
  double q_cap = 1e6;     // bracket limit before declaring demand unbounded
  double f_tol = 1e-10;   // |u_q - perceived| target at interior roots
  int monotone_grid = 256;  // grid size for the cutoff monotonicity check
  bool check_monotone = true;
};

// Steady-state consumption of the theta-consumer: the q where the cutoff map
// perceived(q) - h'(q) crosses theta, or 0 at the corner
// (theta <= perceived(0) - h'(0)). At a tariff kink the crossing may be a
// bunching point where the FOC holds only as an inclusion.
// Throws NonmonotoneCutoffError / UnboundedDemandError.
double best_response(const Preferences& prefs, const PerceptionKernel& kernel,
                     const PriceScheme& scheme, double theta,
                     const BestResponseOptions& opt = {});

struct DynamicsStep {
  int step;
  double q;
  double drift;  // u_q(q, theta) - perceived(q)
};

struct DynamicsResult {
  std::vector<DynamicsStep> trajectory;
  bool converged = false;
  double terminal() const { return trajectory.back().q; }
};

// Explicit-Euler path of the perceived-price adjustment dynamic
//   q_{t+1} = max(0, q_t + step * gain * (u_q(q_t, theta) - perceived(q_t))),
// stopping when |dq| < 1e-10 or max_steps is hit. Non-convergence is reported
// through the flag, with the full trajectory retained.
DynamicsResult simulate_dynamics(const Preferences& prefs,
                                 const PerceptionKernel& kernel,
                                 const PriceScheme& scheme, double theta,
                                 double q0, double gain = 1.0,
                                 double step = 0.1, int max_steps = 200000);

}  // namespace nlpricing
