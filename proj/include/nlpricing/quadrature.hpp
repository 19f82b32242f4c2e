#pragma once

#include <functional>
#include <span>
#include <vector>

namespace nlpricing {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_depth = 48;
};

// Adaptive Simpson integration of f over [lo, hi].
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureOptions& opt = {});

// Same, but with interior panel boundaries inserted (kink locations of
// piecewise tariffs); points outside (lo, hi) are ignored. The tolerance is
// split across panels.
double integrate_with_panels(const std::function<double(double)>& f, double lo,
                             double hi, std::span<const double> interior,
                             const QuadratureOptions& opt = {});

}  // namespace nlpricing
