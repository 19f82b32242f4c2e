#pragma once

#include <variant>
#include <vector>

namespace nlpricing {

// Tariff families. Every tariff satisfies P(0) = 0.

// P(q) = (A/2) q^2 + B q. A > 0 means quantity premia, A < 0 discounts.
struct Quadratic {
  double A = 0.0;
  double B = 0.0;
};

// P(q) = p1 q.
struct Flat {
  double p1 = 0.0;
};

// Two-tier increasing block tariff: rate p2 up to the threshold qbar,
// rate p3 above it. Continuous at qbar by construction.
struct TwoTier {
  double p2 = 0.0;
  double p3 = 0.0;
  double qbar = 1.0;
};

// General piecewise-linear tariff: slopes[i] applies on
// [breakpoints[i], breakpoints[i+1]), and the last slope extends to infinity.
// breakpoints must be strictly increasing with breakpoints[0] == 0.
struct PiecewiseLinear {
  std::vector<double> breakpoints;
  std::vector<double> slopes;
};

using PriceScheme = std::variant<Quadratic, Flat, TwoTier, PiecewiseLinear>;

// Throws DomainError if the scheme's structural invariants fail
// (qbar <= 0, breakpoints not strictly increasing from 0, size mismatch).
void validate(const PriceScheme& scheme);

// Total payment P(q). q >= 0 required.
double price(const PriceScheme& scheme, double q);

// Marginal price P'(q); at a kink returns the right derivative.
double marginal_price(const PriceScheme& scheme, double q);

// Average price P(q)/q; extends continuously at q = 0 with P'(0+).
double average_price(const PriceScheme& scheme, double q);

// Interior kink locations of P' (sorted, strictly positive). Empty for
// smooth schemes.
std::vector<double> kink_points(const PriceScheme& scheme);

}  // namespace nlpricing
