#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nlpricing/exec.hpp"
#include "nlpricing/market.hpp"

namespace nlpricing {

// Dimensionless surfaces of the comparative statics, with c2 = p * h2:
//   welfare(profit-opt scheme)  = K * F(a1, p)
//   efficiency cost             = K * G(a1, p),  G = 1/(p+1) - F
//   consumer surplus            = K * H(a1, p)
// where K = (theta1+h1-c1)^3 / (6 (theta1-theta0) h2), plus the auxiliary
// polynomial f_aux from the surplus derivative's numerator.
struct ShapeValues {
  double F;
  double G;
  double H;
  double f_aux;
};

// Domain: 0 <= a1 < 2/3, p >= 0; throws DomainError outside.
ShapeValues shape_functions(double a1, double p);

// Closed-form partial derivatives dF/da1 and dH/da1 (transcribed rational
// expressions, guarded in tests against finite differences).
double shape_F_da1(double a1, double p);
double shape_H_da1(double a1, double p);

enum class Sign { positive, negative, zero, undetermined };

// Sign of dW/da1 at the profit-optimal scheme: "+" claimed on (1/3, 1/2),
// "-" claimed for a1 > (1+sqrt(73))/18, undetermined elsewhere. Always
// cross-validates the printed rational derivative against a central finite
// difference of F and throws OracleDisagreementError if they differ.
Sign welfare_bias_derivative_sign(double a1, double p);

struct ProfitBiasSign {
  Sign sign;
  // Interior minimizer a1 = (h2-c2)/(3h2-c2), present when h2 > c2.
  std::optional<double> minimizer;
};

// Sign of dpi*/da1 = sign of c2(1-a1) + h2(3a1-1): positive iff the optimal
// quadratic tariff is convex.
ProfitBiasSign profit_bias_derivative_sign(double a1, double c2, double h2);

struct SurplusBiasSign {
  Sign sign;
  bool from_proposition;  // false when resolved numerically
};

// Sign of dCS/da1: "+" claimed for p <= 1.94 and
// a1 < max{(1-p)/(3-p), (p-1)/(p+1)}; "-" claimed for a1 > 0.4; otherwise
// the finite-difference sign of H, tagged numeric.
SurplusBiasSign surplus_bias_derivative_sign(double a1, double p);

// Efficiency cost of the unregulated monopolist: max welfare minus welfare
// under the profit-optimal quadratic tariff (closed forms; works for h2 = 0
// where the G surface is not defined).
double efficiency_cost(const MarketEnv& env);

struct SweepRow {
  double a1;
  double p;
  double F;
  double G;
  double H;
  double profit;
  double welfare;
  double surplus;
  double efficiency_cost;
};

struct SweepOptions {
  unsigned seed = 0;
  int cross_checks = 5;  // random grid points re-verified by quadrature
  Exec exec = Exec::parallel;
};

// Closed-form table over the (a1, p) grid, scaled by the template
// environment's K (theta0/theta1/h1/h2/c1; c2 is replaced by p*h2 per row).
// A seeded random subset of rows in the exact regime is cross-checked
// against market quadrature; disagreement throws OracleDisagreementError.
std::vector<SweepRow> sweep(const MarketEnv& env_template,
                            std::span<const double> a1_grid,
                            std::span<const double> p_grid,
                            const SweepOptions& opt = {});

}  // namespace nlpricing
