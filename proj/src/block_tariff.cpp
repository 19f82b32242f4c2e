#include "nlpricing/block_tariff.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nlpricing/errors.hpp"

namespace nlpricing {

namespace {

void require_block_preconditions(double p1, double p2, double p3, double qbar,
                                 double lambda) {
  if (!(p2 <= p1) || !(p1 <= p3)) {
    throw RegimeError("block comparison needs p2 <= p1 <= p3");
  }
  if (!(qbar > 0.0)) throw RegimeError("block threshold qbar must be > 0");
  if (lambda < 0.0 || lambda > 1.0) {
    throw RegimeError("population fraction lambda must lie in [0, 1]");
  }
}

}  // namespace

BlockRegime classify_regime(const MarketEnv& env, double p1, double p2,
                            double p3, double qbar) {
  if (p1 == p2 && p3 >= p2) return BlockRegime::prop8;
  if (p2 <= p1 && p1 < p3) {
    const double hmarg = env.prefs.h_prime(qbar);
    if (p2 - hmarg <= env.theta1 && env.theta1 < p1 - hmarg) {
      return BlockRegime::prop7;
    }
  }
  return BlockRegime::other;
}

BlockComparison compare_block_vs_flat(const MarketEnv& env, double p1,
                                      double p2, double p3, double qbar,
                                      double lambda) {
  require_block_preconditions(p1, p2, p3, qbar, lambda);
  const PriceScheme flat = Flat{p1};
  const PriceScheme block = TwoTier{p2, p3, qbar};
  BlockComparison cmp;
  cmp.Q_flat = aggregate_consumption(env, flat, lambda);
  cmp.Q_block = aggregate_consumption(env, block, lambda);
  cmp.dQ = cmp.Q_flat - cmp.Q_block;

  switch (classify_regime(env, p1, p2, p3, qbar)) {
    case BlockRegime::prop7:
      if (!(cmp.Q_block > cmp.Q_flat)) {
        throw OracleDisagreementError(
            "block tariff did not raise aggregate consumption in the prop7 window");
      }
      break;
    case BlockRegime::prop8:
      if (cmp.dQ < -1e-9) {
        throw OracleDisagreementError(
            "block tariff raised aggregate consumption despite an equal bottom rate");
      }
      break;
    case BlockRegime::other:
      break;
  }
  return cmp;
}

BlockComparisonReport lambda_sweep(const MarketEnv& env, double p1, double p2,
                                   double p3, double qbar,
                                   std::span<const double> lambdas,
                                   Exec exec) {
  for (double l : lambdas) require_block_preconditions(p1, p2, p3, qbar, l);

  BlockComparisonReport report;
  report.p1 = p1;
  report.p2 = p2;
  report.p3 = p3;
  report.qbar = qbar;
  report.regime = classify_regime(env, p1, p2, p3, qbar);

  report.rows.resize(lambdas.size());
  parallel_for(lambdas.size(), exec, [&](std::size_t i) {
    const double lambda = lambdas[i];
    const double qf =
        aggregate_consumption(env, PriceScheme{Flat{p1}}, lambda);
    const double qb =
        aggregate_consumption(env, PriceScheme{TwoTier{p2, p3, qbar}}, lambda);
    report.rows[i] = {lambda, qf, qb, qf - qb};
  });

  if (report.regime == BlockRegime::prop8) {
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
      if (report.rows[i].dQ > report.rows[i - 1].dQ + 1e-9) {
        throw OracleDisagreementError(
            "dQ(lambda) is not nonincreasing with an equal bottom rate");
      }
    }
  }

  // Least-squares affine fit of dQ(lambda).
  const std::size_t n = report.rows.size();
  if (n >= 2) {
    double sl = 0.0, sd = 0.0, sll = 0.0, sld = 0.0;
    for (const auto& r : report.rows) {
      sl += r.lambda;
      sd += r.dQ;
      sll += r.lambda * r.lambda;
      sld += r.lambda * r.dQ;
    }
    const double nn = static_cast<double>(n);
    const double det = nn * sll - sl * sl;
    if (std::abs(det) > 1e-15) {
      report.slope = (nn * sld - sl * sd) / det;
      report.intercept = (sd * sll - sl * sld) / det;
      for (const auto& r : report.rows) {
        report.max_affine_dev =
            std::max(report.max_affine_dev,
                     std::abs(report.intercept + report.slope * r.lambda - r.dQ));
      }
    }
  } else if (n == 1) {
    report.intercept = report.rows[0].dQ;
  }
  return report;
}

namespace {

MarketEnv battery_env(double theta1) {
  Preferences prefs;
  prefs.h1 = 0.0;
  prefs.h2 = 1.0;
  return MarketEnv::make(prefs, 0.0, 1.0, 0.0, theta1,
                         PerceptionKernel::dirac0());
}

BatteryDraw run_draw(double p1, double p2, double p3, double qbar,
                     double theta1) {
  BatteryDraw d;
  d.p1 = p1;
  d.p2 = p2;
  d.p3 = p3;
  d.qbar = qbar;
  d.theta1 = theta1;
  const MarketEnv env = battery_env(theta1);
  const PriceScheme flat = Flat{p1};
  const PriceScheme block = TwoTier{p2, p3, qbar};
  const double lambdas[3] = {0.0, 0.5, 1.0};
  for (int k = 0; k < 3; ++k) {
    d.Q_flat[k] = aggregate_consumption(env, flat, lambdas[k]);
    d.Q_block[k] = aggregate_consumption(env, block, lambdas[k]);
  }
  return d;
}

double draw_uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

std::vector<BatteryDraw> prop7_battery(int draws, unsigned seed, Exec exec) {
  std::vector<BatteryDraw> out(static_cast<std::size_t>(draws));
  parallel_for(out.size(), exec, [&](std::size_t i) {
    std::mt19937 rng(seed + static_cast<unsigned>(i));
    rng.discard(16);
    const double qbar = draw_uniform(rng, 0.2, 1.0);
    const double p2 = draw_uniform(rng, 0.05, 0.7);
    const double p1 = p2 + draw_uniform(rng, 0.05, 0.45);
    const double p3 = p1 + draw_uniform(rng, 0.05, 0.8);
    // theta1 inside the window [p2 + h2 qbar, p1 + h2 qbar).
    const double theta1 =
        draw_uniform(rng, p2 + qbar, p1 + qbar - 1e-6 * (p1 - p2));
    out[i] = run_draw(p1, p2, p3, qbar, theta1);
  });
  return out;
}

std::vector<BatteryDraw> prop8_battery(int draws, unsigned seed, Exec exec) {
  std::vector<BatteryDraw> out(static_cast<std::size_t>(draws));
  parallel_for(out.size(), exec, [&](std::size_t i) {
    std::mt19937 rng(seed + static_cast<unsigned>(i));
    rng.discard(16);
    const double qbar = draw_uniform(rng, 0.2, 1.0);
    const double p2 = draw_uniform(rng, 0.05, 0.8);
    const double p3 = p2 + draw_uniform(rng, 0.05, 1.0);
    const double theta1 = draw_uniform(rng, p2 + 0.2, p3 + qbar + 0.5);
    out[i] = run_draw(p2, p2, p3, qbar, theta1);
  });
  return out;
}

}  // namespace nlpricing
