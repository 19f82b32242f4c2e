#include "nlpricing/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace nlpricing {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double b,
                double fa, double fm, double fb, double whole, double tol,
                int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureOptions& opt) {
  if (lo == hi) return 0.0;
  double sign = 1.0;
  if (hi < lo) {
    std::swap(lo, hi);
    sign = -1.0;
  }
  const double fa = f(lo);
  const double fb = f(hi);
  const double m = 0.5 * (lo + hi);
  const double fm = f(m);
  const double whole = simpson(fa, fm, fb, hi - lo);
  return sign *
         adaptive(f, lo, hi, fa, fm, fb, whole, opt.abs_tol, opt.max_depth);
}

double integrate_with_panels(const std::function<double(double)>& f, double lo,
                             double hi, std::span<const double> interior,
                             const QuadratureOptions& opt) {
  if (lo == hi) return 0.0;
  double sign = 1.0;
  if (hi < lo) {
    std::swap(lo, hi);
    sign = -1.0;
  }
  std::vector<double> cuts;
  cuts.push_back(lo);
  for (double p : interior) {
    if (p > lo && p < hi) cuts.push_back(p);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  QuadratureOptions panel_opt = opt;
  panel_opt.abs_tol = opt.abs_tol / static_cast<double>(cuts.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += integrate(f, cuts[i], cuts[i + 1], panel_opt);
  }
  return sign * total;
}

}  // namespace nlpricing
