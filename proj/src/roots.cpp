#include "nlpricing/roots.hpp"

#include <cmath>

namespace nlpricing {

double bisect_threshold(const std::function<bool(double)>& pred, double lo,
                        double hi, double xtol, int max_iter) {
  if (pred(lo)) return lo;
  for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double xtol, int max_iter) {
  double flo = f(lo);
  if (flo >= 0.0) return lo;
  for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace nlpricing
