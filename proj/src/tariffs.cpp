#include "nlpricing/tariffs.hpp"

#include <cmath>
#include <cstddef>

#include "nlpricing/errors.hpp"

namespace nlpricing {

namespace {

void require_nonnegative_q(double q) {
  if (q < 0.0 || std::isnan(q)) {
    throw DomainError("quantity must be nonnegative");
  }
}

// Index of the segment containing q (last segment whose breakpoint <= q).
std::size_t segment_of(const PiecewiseLinear& s, double q) {
  std::size_t i = 0;
  while (i + 1 < s.breakpoints.size() && q >= s.breakpoints[i + 1]) ++i;
  return i;
}

}  // namespace

void validate(const PriceScheme& scheme) {
  if (const auto* tt = std::get_if<TwoTier>(&scheme)) {
    if (!(tt->qbar > 0.0)) throw DomainError("two-tier threshold must be > 0");
    return;
  }
  if (const auto* pwl = std::get_if<PiecewiseLinear>(&scheme)) {
    if (pwl->breakpoints.empty() || pwl->breakpoints.front() != 0.0) {
      throw DomainError("piecewise breakpoints must start at 0");
    }
    if (pwl->slopes.size() != pwl->breakpoints.size()) {
      throw DomainError("piecewise needs one slope per breakpoint");
    }
    for (std::size_t i = 0; i + 1 < pwl->breakpoints.size(); ++i) {
      if (!(pwl->breakpoints[i] < pwl->breakpoints[i + 1])) {
        throw DomainError("piecewise breakpoints must be strictly increasing");
      }
    }
  }
}

double price(const PriceScheme& scheme, double q) {
  require_nonnegative_q(q);
  return std::visit(
      [q](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          return 0.5 * s.A * q * q + s.B * q;
        } else if constexpr (std::is_same_v<T, Flat>) {
          return s.p1 * q;
        } else if constexpr (std::is_same_v<T, TwoTier>) {
          if (q <= s.qbar) return s.p2 * q;
          return s.p2 * s.qbar + s.p3 * (q - s.qbar);
        } else {
          const std::size_t i = segment_of(s, q);
          double total = 0.0;
          for (std::size_t k = 0; k < i; ++k) {
            total += s.slopes[k] * (s.breakpoints[k + 1] - s.breakpoints[k]);
          }
          return total + s.slopes[i] * (q - s.breakpoints[i]);
        }
      },
      scheme);
}

double marginal_price(const PriceScheme& scheme, double q) {
  require_nonnegative_q(q);
  return std::visit(
      [q](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          return s.A * q + s.B;
        } else if constexpr (std::is_same_v<T, Flat>) {
          return s.p1;
        } else if constexpr (std::is_same_v<T, TwoTier>) {
          // Right derivative at the kink: incremental units cost p3.
          return q < s.qbar ? s.p2 : s.p3;
        } else {
          return s.slopes[segment_of(s, q)];
        }
      },
      scheme);
}

double average_price(const PriceScheme& scheme, double q) {
  require_nonnegative_q(q);
  if (q == 0.0) return marginal_price(scheme, 0.0);
  return price(scheme, q) / q;
}

std::vector<double> kink_points(const PriceScheme& scheme) {
  if (const auto* tt = std::get_if<TwoTier>(&scheme)) {
    if (tt->p2 != tt->p3) return {tt->qbar};
    return {};
  }
  if (const auto* pwl = std::get_if<PiecewiseLinear>(&scheme)) {
    std::vector<double> kinks;
    for (std::size_t i = 1; i < pwl->breakpoints.size(); ++i) {
      if (pwl->slopes[i] != pwl->slopes[i - 1]) {
        kinks.push_back(pwl->breakpoints[i]);
      }
    }
    return kinks;
  }
  return {};
}

}  // namespace nlpricing
