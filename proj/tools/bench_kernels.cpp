// Timing comparison of the data-parallel kernels under the serial and
// OpenMP execution policies.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "nlpricing/block_tariff.hpp"
#include "nlpricing/consumer.hpp"
#include "nlpricing/exec.hpp"
#include "nlpricing/market.hpp"
#include "nlpricing/quadratic.hpp"
#include "nlpricing/statics.hpp"

using namespace nlpricing;

namespace {

MarketEnv anchor_env(double a1) {
  Preferences prefs;
  prefs.h2 = 1.0;
  return MarketEnv::make(prefs, 0.0, 1.0, 0.0, 1.0,
                         PerceptionKernel::mix_dirac(a1));
}

double time_ms(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

void report(const char* name, const std::function<void(Exec)>& kernel) {
  kernel(Exec::serial);  // warm up
  const double serial = time_ms([&] { kernel(Exec::serial); });
  const double parallel = time_ms([&] { kernel(Exec::parallel); });
  std::printf("%-28s %10.1f ms %10.1f ms %8.2fx\n", name, serial, parallel,
              serial / parallel);
}

}  // namespace

int main() {
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  const MarketEnv env = anchor_env(0.5);

  report("objective grid 301x301", [&](Exec exec) {
    const int n = 301;
    std::vector<double> values(static_cast<std::size_t>(n) * n);
    parallel_for(values.size(), exec, [&](std::size_t idx) {
      const int i = static_cast<int>(idx) / n;
      const int j = static_cast<int>(idx) % n;
      const double A = -10.0 + 20.0 * i / (n - 1);
      const double B = -1.0 + 3.0 * j / (n - 1);
      values[idx] = quadratic_objective(env, Objective::profit, A, B);
    });
  });

  report("statics sweep 120x120", [&](Exec exec) {
    std::vector<double> a1_grid, p_grid;
    for (int i = 0; i < 120; ++i) {
      a1_grid.push_back(0.65 * i / 119);
      p_grid.push_back(10.0 * i / 119);
    }
    SweepOptions opt;
    opt.cross_checks = 0;
    opt.exec = exec;
    sweep(env, a1_grid, p_grid, opt);
  });

  report("best-response sweep 20000", [&](Exec exec) {
    const PriceScheme scheme = TwoTier{0.4, 0.9, 0.5};
    const PerceptionKernel kernel = PerceptionKernel::uniform();
    const int n = 20000;
    std::vector<double> q(n);
    BestResponseOptions opt;
    opt.check_monotone = false;
    parallel_for(q.size(), exec, [&](std::size_t i) {
      const double theta = 1.5 * static_cast<double>(i) / (n - 1);
      q[i] = best_response(env.prefs, kernel, scheme, theta, opt);
    });
  });

  report("prop8 battery 64 draws", [&](Exec exec) {
    prop8_battery(64, 1234, exec);
  });

  return 0;
}
