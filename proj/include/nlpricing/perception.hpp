#pragma once

#include <string>
#include <vector>

#include "nlpricing/tariffs.hpp"

namespace nlpricing {

// A perception kernel is the family {F_q} of weighting distributions on
// [0, q] that defines the perceived marginal price
//
//   perceived(q) = integral of P'(q - eps) dF_q(eps).
//
// Every built-in kernel is self-similar: F_q is the law of q * X for a fixed
// random variable X on [0, 1], represented canonically as point masses at
// fractions f_i of q plus a uniform-density component. This makes the
// linear-mean property hold with a1 = sum(w_i f_i) + w_uniform / 2.
class PerceptionKernel {
 public:
  enum class Kind { dirac0, uniform, mix_dirac, beta_mix, custom };

  struct Atom {
    double frac;    // mass located at eps = frac * q, frac in [0, 1]
    double weight;  // probability mass, >= 0
  };

  // Rational perception: all mass at eps = 0, perceived = marginal price.
  static PerceptionKernel dirac0();
  // Average-price perception: uniform weighting of past marginal prices.
  static PerceptionKernel uniform();
  // Mass lambda at eps = q (sees P'(0)) and 1 - lambda at eps = 0.
  static PerceptionKernel mix_dirac(double lambda);
  // Weight beta on the average price, 1 - beta on the marginal price.
  static PerceptionKernel beta_mix(double beta);
  // Discrete kernel from normalized quadrature nodes/weights on [0, 1].
  static PerceptionKernel custom(std::vector<double> nodes,
                                 std::vector<double> weights);

  Kind kind() const { return kind_; }
  // Mixing parameter of mix_dirac / beta_mix kernels (for serialization).
  double parameter() const { return parameter_; }

  const std::vector<Atom>& atoms() const { return atoms_; }
  double uniform_weight() const { return uniform_weight_; }

  // The linear-mean coefficient a1 with mean(F_q) = a1 * q. For custom
  // kernels re-verifies the assumption at q in {0.5, 1, 2} (and that the
  // weights form a probability distribution), throwing
  // AssumptionViolationError on failure.
  double mean_fraction() const;

  std::string kind_name() const;

 private:
  PerceptionKernel() = default;

  Kind kind_ = Kind::dirac0;
  double parameter_ = 0.0;
  std::vector<Atom> atoms_;
  double uniform_weight_ = 0.0;
};

// Perceived marginal price at q (exact closed form: atoms hit P' directly,
// the uniform component contributes the average price). q >= 0 required;
// at q = 0 returns P'(0+) for every kernel.
double perceived_marginal(const PerceptionKernel& kernel,
                          const PriceScheme& scheme, double q);

// Independent route: the uniform-density component is integrated by adaptive
// Simpson with tariff kinks as panel boundaries. Used to cross-check the
// closed forms.
double perceived_marginal_quadrature(const PerceptionKernel& kernel,
                                     const PriceScheme& scheme, double q,
                                     double abs_tol = 1e-10);

}  // namespace nlpricing
