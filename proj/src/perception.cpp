#include "nlpricing/perception.hpp"

#include <cmath>

#include "nlpricing/errors.hpp"
#include "nlpricing/quadrature.hpp"

namespace nlpricing {

PerceptionKernel PerceptionKernel::dirac0() {
  PerceptionKernel k;
  k.kind_ = Kind::dirac0;
  k.atoms_ = {{0.0, 1.0}};
  return k;
}

PerceptionKernel PerceptionKernel::uniform() {
  PerceptionKernel k;
  k.kind_ = Kind::uniform;
  k.uniform_weight_ = 1.0;
  return k;
}

PerceptionKernel PerceptionKernel::mix_dirac(double lambda) {
  if (lambda < 0.0 || lambda > 1.0) {
    throw DomainError("mix_dirac weight must be in [0, 1]");
  }
  PerceptionKernel k;
  k.kind_ = Kind::mix_dirac;
  k.parameter_ = lambda;
  k.atoms_ = {{1.0, lambda}, {0.0, 1.0 - lambda}};
  return k;
}

PerceptionKernel PerceptionKernel::beta_mix(double beta) {
  if (beta < 0.0 || beta > 1.0) {
    throw DomainError("beta_mix weight must be in [0, 1]");
  }
  PerceptionKernel k;
  k.kind_ = Kind::beta_mix;
  k.parameter_ = beta;
  k.uniform_weight_ = beta;
  k.atoms_ = {{0.0, 1.0 - beta}};
  return k;
}

PerceptionKernel PerceptionKernel::custom(std::vector<double> nodes,
                                          std::vector<double> weights) {
  if (nodes.empty() || nodes.size() != weights.size()) {
    throw AssumptionViolationError("custom kernel needs matching nonempty node/weight lists");
  }
  PerceptionKernel k;
  k.kind_ = Kind::custom;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] < 0.0 || nodes[i] > 1.0) {
      throw AssumptionViolationError("custom kernel nodes must lie in [0, 1]");
    }
    if (weights[i] < 0.0) {
      throw AssumptionViolationError("custom kernel weights must be nonnegative");
    }
    k.atoms_.push_back({nodes[i], weights[i]});
  }
  return k;
}

double PerceptionKernel::mean_fraction() const {
  double mass = uniform_weight_;
  double a1 = 0.5 * uniform_weight_;
  for (const Atom& a : atoms_) {
    mass += a.weight;
    a1 += a.weight * a.frac;
  }
  if (kind_ == Kind::custom) {
    if (std::abs(mass - 1.0) > 1e-9) {
      throw AssumptionViolationError("custom kernel weights must sum to 1");
    }
    // Linear-mean check at a few quantities: mean of F_q must equal a1*q.
    for (double q : {0.5, 1.0, 2.0}) {
      double mean = 0.0;
      for (const Atom& a : atoms_) mean += a.weight * (a.frac * q);
      if (std::abs(mean - a1 * q) > 1e-9) {
        throw AssumptionViolationError("custom kernel violates the linear-mean assumption");
      }
    }
  }
  return a1;
}

std::string PerceptionKernel::kind_name() const {
  switch (kind_) {
    case Kind::dirac0: return "dirac0";
    case Kind::uniform: return "uniform";
    case Kind::mix_dirac: return "mixdirac";
    case Kind::beta_mix: return "betamix";
    case Kind::custom: return "custom";
  }
  return "?";
}

double perceived_marginal(const PerceptionKernel& kernel,
                          const PriceScheme& scheme, double q) {
  if (q < 0.0 || std::isnan(q)) {
    throw DomainError("quantity must be nonnegative");
  }
  if (q == 0.0) return marginal_price(scheme, 0.0);
  double value = 0.0;
  for (const auto& a : kernel.atoms()) {
    if (a.weight == 0.0) continue;
    value += a.weight * marginal_price(scheme, q * (1.0 - a.frac));
  }
  if (kernel.uniform_weight() > 0.0) {
    // The uniform component averages P' over [0, q], i.e. the average price.
    value += kernel.uniform_weight() * (price(scheme, q) / q);
  }
  return value;
}

double perceived_marginal_quadrature(const PerceptionKernel& kernel,
                                     const PriceScheme& scheme, double q,
                                     double abs_tol) {
  if (q < 0.0 || std::isnan(q)) {
    throw DomainError("quantity must be nonnegative");
  }
  if (q == 0.0) return marginal_price(scheme, 0.0);
  double value = 0.0;
  for (const auto& a : kernel.atoms()) {
    if (a.weight == 0.0) continue;
    value += a.weight * marginal_price(scheme, q * (1.0 - a.frac));
  }
  if (kernel.uniform_weight() > 0.0) {
    // integral of P'(q - eps) / q over eps in [0, q]; panel boundaries where
    // q - eps hits a tariff kink.
    std::vector<double> panels;
    for (double k : kink_points(scheme)) {
      if (k < q) panels.push_back(q - k);
    }
    const double part = integrate_with_panels(
        [&](double eps) { return marginal_price(scheme, q - eps); }, 0.0, q,
        panels, {abs_tol, 48});
    value += kernel.uniform_weight() * part / q;
  }
  return value;
}

}  // namespace nlpricing
