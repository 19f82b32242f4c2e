#pragma once

#include <functional>

namespace nlpricing {

// Smallest x in [lo, hi] with pred(x) true, assuming pred is monotone
// false -> true over [lo, hi] and pred(hi) is true. Plain bisection; works
// for maps with upward jumps (converges to the jump location).
double bisect_threshold(const std::function<bool(double)>& pred, double lo,
                        double hi, double xtol, int max_iter = 200);

// Root of an increasing function f with f(lo) <= 0 <= f(hi).
double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double xtol, int max_iter = 200);

}  // namespace nlpricing
