#pragma once

#include <span>
#include <vector>

#include "nlpricing/exec.hpp"
#include "nlpricing/market.hpp"

namespace nlpricing {

enum class BlockRegime {
  prop7,  // p2 <= p1 < p3 and p2 - h'(qbar) <= theta1 < p1 - h'(qbar)
  prop8,  // p1 == p2 (same bottom rate)
  other
};

struct BlockComparison {
  double Q_flat;
  double Q_block;
  double dQ;  // Q_flat - Q_block
};

// Classifies the (p1, p2, p3, qbar) configuration against the environment.
BlockRegime classify_regime(const MarketEnv& env, double p1, double p2,
                            double p3, double qbar);

// Aggregate consumption under the flat tariff p1 and the two-tier tariff
// (p2, p3, qbar) with a fraction lambda of average-price-biased consumers.
// Requires p2 <= p1 <= p3, qbar > 0 and lambda in [0, 1]; in the prop7
// regime additionally verifies Q_block > Q_flat, in prop8 dQ >= 0
// (OracleDisagreementError if a verified regime claim fails numerically).
BlockComparison compare_block_vs_flat(const MarketEnv& env, double p1,
                                      double p2, double p3, double qbar,
                                      double lambda);

struct BlockComparisonReport {
  double p1, p2, p3, qbar;
  BlockRegime regime;
  struct Row {
    double lambda;
    double Q_flat;
    double Q_block;
    double dQ;
  };
  std::vector<Row> rows;
  // Least-squares affine fit dQ(lambda) = intercept + slope * lambda and its
  // maximum absolute deviation (dQ is affine in lambda by construction).
  double slope = 0.0;
  double intercept = 0.0;
  double max_affine_dev = 0.0;
};

// Rows over the lambda grid; in the prop8 regime verifies dQ nonincreasing
// across the grid.
BlockComparisonReport lambda_sweep(const MarketEnv& env, double p1, double p2,
                                   double p3, double qbar,
                                   std::span<const double> lambdas,
                                   Exec exec = Exec::parallel);

struct BatteryDraw {
  double p1, p2, p3, qbar, theta1;
  double Q_flat[3];   // at lambda = 0, 0.5, 1
  double Q_block[3];
};

// Seeded randomized draw batteries behind the Prop 7 / Prop 8 checks. Each
// draw is generated from seed + index, so results are identical under both
// execution policies.
std::vector<BatteryDraw> prop7_battery(int draws, unsigned seed,
                                       Exec exec = Exec::parallel);
std::vector<BatteryDraw> prop8_battery(int draws, unsigned seed,
                                       Exec exec = Exec::parallel);

}  // namespace nlpricing
