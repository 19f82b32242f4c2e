// Command-line front end: parse env/scheme/kernel config files, dispatch to
// the analysis modules, and emit CSV tables.
//
// Exit codes: 0 success, 1 precondition/hypothesis/config violations,
// 2 closed-form vs numerical-oracle disagreement.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlpricing/block_tariff.hpp"
#include "nlpricing/config.hpp"
#include "nlpricing/csv.hpp"
#include "nlpricing/errors.hpp"
#include "nlpricing/market.hpp"
#include "nlpricing/quadratic.hpp"
#include "nlpricing/statics.hpp"
#include "nlpricing/variational.hpp"

namespace {

using namespace nlpricing;

// --out FILE, defaulting to standard output.
class OutStream {
 public:
  explicit OutStream(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot open output file: " + path);
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

nlohmann::json section(const nlohmann::json& j, const char* name) {
  return j.contains(name) ? j.at(name) : j;
}

MarketEnv load_env(const std::string& path) {
  return parse_env(section(load_config_file(path), "env"));
}

PriceScheme load_scheme(const std::string& path) {
  return parse_scheme(section(load_config_file(path), "scheme"));
}

std::string scheme_id(const PriceScheme& scheme) {
  return scheme_to_json(scheme)["kind"].get<std::string>();
}

int run_optimize(const std::string& env_path, const std::string& objective,
                 bool oracle, const std::string& out_path, unsigned /*seed*/) {
  const MarketEnv env = load_env(env_path);
  const Objective obj =
      objective == "welfare" ? Objective::welfare : Objective::profit;
  const QuadraticOptimum closed = obj == Objective::profit
                                      ? optimal_profit_scheme(env)
                                      : optimal_welfare_scheme(env);
  OutStream out(out_path);
  CsvWriter csv(out.get());
  const std::vector<std::string> head = {"A", "B", "q_star", "value", "source"};
  csv.header(head);
  const double closed_row[] = {closed.A, closed.B, closed.q_star, closed.value};
  csv.row_with_tag(closed_row, "closed_form");
  if (oracle) {
    const QuadraticOptimum num = numeric_quadratic_search(env, obj);
    const double num_row[] = {num.A, num.B, num.q_star, num.value};
    csv.row_with_tag(num_row, "oracle");
    const bool agrees =
        std::abs(num.A - closed.A) <= 1e-4 && std::abs(num.B - closed.B) <= 1e-4 &&
        std::abs(num.value - closed.value) <=
            1e-7 * std::max(1.0, std::abs(closed.value));
    if (!agrees) {
      throw OracleDisagreementError("numeric search disagrees with the closed form");
    }
  }
  return 0;
}

int run_welfare(const std::string& env_path, const std::string& scheme_path,
                double lambda, const std::string& out_path) {
  const MarketEnv env = load_env(env_path);
  const PriceScheme scheme = load_scheme(scheme_path);
  const double pi = expected_profit(env, scheme);
  const double w = expected_welfare(env, scheme);
  const double q = aggregate_consumption(env, scheme, lambda);
  OutStream out(out_path);
  CsvWriter csv(out.get());
  const std::vector<std::string> head = {"scheme", "profit", "welfare",
                                         "surplus", "Q"};
  // scheme id leads, so emit it as a plain text cell.
  out.get() << head[0] << ',' << head[1] << ',' << head[2] << ',' << head[3]
            << ',' << head[4] << '\n';
  out.get() << scheme_id(scheme) << ',' << format_g9(pi) << ',' << format_g9(w)
            << ',' << format_g9(w - pi) << ',' << format_g9(q) << '\n';
  return 0;
}

int run_sweep(const std::string& env_path, const std::string& a1_spec,
              const std::string& p_spec, bool figure1,
              const std::string& out_path, unsigned seed) {
  MarketEnv env = [&] {
    if (!env_path.empty()) return load_env(env_path);
    Preferences prefs;
    prefs.h2 = 1.0;
    return MarketEnv::make(prefs, 0.0, 1.0, 0.0, 1.0,
                           PerceptionKernel::dirac0());
  }();
  const std::vector<double> a1_grid = parse_grid_spec(a1_spec);
  const std::vector<double> p_grid = parse_grid_spec(p_spec);
  SweepOptions opt;
  opt.seed = seed;
  const std::vector<SweepRow> rows = sweep(env, a1_grid, p_grid, opt);

  OutStream out(out_path);
  CsvWriter csv(out.get());
  if (figure1) {
    const std::vector<std::string> head = {"a1", "p", "G"};
    csv.header(head);
    for (const auto& r : rows) {
      const double vals[] = {r.a1, r.p, r.G};
      csv.row(vals);
    }
  } else {
    const std::vector<std::string> head = {"a1",      "p",       "F",
                                           "G",       "H",       "profit",
                                           "welfare", "surplus", "efficiency_cost"};
    csv.header(head);
    for (const auto& r : rows) {
      const double vals[] = {r.a1,     r.p,       r.F,       r.G,
                             r.H,      r.profit,  r.welfare, r.surplus,
                             r.efficiency_cost};
      csv.row(vals);
    }
  }
  return 0;
}

int run_el_check(const std::string& env_path, const std::string& scheme_path,
                 double beta, int points, const std::string& out_path) {
  const MarketEnv base = load_env(env_path);
  const MarketEnv env =
      MarketEnv::make(base.prefs, base.c1, base.c2, base.theta0, base.theta1,
                      PerceptionKernel::beta_mix(beta));
  const VariationalProblem problem(env, load_scheme(scheme_path));
  const double qs = problem.q_star();
  if (!std::isfinite(qs) || qs <= 0.0) {
    throw UnboundedDomainError("candidate scheme has no positive finite q*");
  }
  OutStream out(out_path);
  CsvWriter csv(out.get());
  const std::vector<std::string> head = {"q", "residual"};
  csv.header(head);
  for (int i = 0; i < points; ++i) {
    const double q = qs * (i + 0.5) / points;
    if (q < 1e-6) continue;
    try {
      const double vals[] = {q, euler_lagrange_residual(problem, q)};
      csv.row(vals);
    } catch (const KinkError&) {
      // profile simply skips kink neighborhoods
    }
  }
  const auto [gap_top, markup_top] = transversality_check(problem);
  csv.comment("gap_top=" + format_g9(gap_top) +
              " markup_at_top=" + format_g9(markup_top));
  return 0;
}

int run_block_compare(const std::string& env_path, double p1, double p2,
                      double p3, double qbar, const std::string& grid_spec,
                      const std::string& out_path) {
  const MarketEnv env = load_env(env_path);
  const std::vector<double> lambdas = parse_grid_spec(grid_spec);
  const BlockComparisonReport report =
      lambda_sweep(env, p1, p2, p3, qbar, lambdas);
  OutStream out(out_path);
  CsvWriter csv(out.get());
  const std::vector<std::string> head = {"lambda", "Q_flat", "Q_block", "dQ"};
  csv.header(head);
  for (const auto& r : report.rows) {
    const double vals[] = {r.lambda, r.Q_flat, r.Q_block, r.dQ};
    csv.row(vals);
  }
  const char* regime = report.regime == BlockRegime::prop7   ? "prop7"
                       : report.regime == BlockRegime::prop8 ? "prop8"
                                                             : "other";
  csv.comment(std::string("regime=") + regime +
              " slope=" + format_g9(report.slope) +
              " intercept=" + format_g9(report.intercept) +
              " max_affine_dev=" + format_g9(report.max_affine_dev));
  return 0;
}

int run_dynamics(const std::string& env_path, const std::string& scheme_path,
                 double theta, double q0, double gain, double step,
                 int max_steps, const std::string& out_path) {
  const MarketEnv env = load_env(env_path);
  const PriceScheme scheme = load_scheme(scheme_path);
  const DynamicsResult result = simulate_dynamics(
      env.prefs, env.kernel, scheme, theta, q0, gain, step, max_steps);
  OutStream out(out_path);
  CsvWriter csv(out.get());
  const std::vector<std::string> head = {"step", "q", "drift"};
  csv.header(head);
  for (const auto& s : result.trajectory) {
    const double vals[] = {static_cast<double>(s.step), s.q, s.drift};
    csv.row(vals);
  }
  if (!result.converged) {
    std::cerr << "error: dynamics did not converge within " << max_steps
              << " steps (trajectory emitted)\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear tariff analysis with perceived marginal prices"};
  app.require_subcommand(1);

  unsigned seed = 0;
  app.add_option("--seed", seed, "seed for randomized cross-checks");

  auto* optimize = app.add_subcommand("optimize", "closed-form optimal quadratic tariff");
  std::string opt_objective = "profit", opt_env, opt_out;
  bool opt_oracle = false;
  optimize->add_option("--objective", opt_objective, "profit|welfare")
      ->check(CLI::IsMember({"profit", "welfare"}));
  optimize->add_option("--env", opt_env, "environment config file")->required();
  optimize->add_flag("--oracle", opt_oracle, "also run the numeric search");
  optimize->add_option("--out", opt_out, "output CSV (default stdout)");

  auto* welfare = app.add_subcommand("welfare", "profit/welfare/surplus of a scheme");
  std::string wel_env, wel_scheme, wel_out;
  double wel_lambda = 0.0;
  welfare->add_option("--env", wel_env)->required();
  welfare->add_option("--scheme", wel_scheme)->required();
  welfare->add_option("--lambda", wel_lambda, "biased population share for Q");
  welfare->add_option("--out", wel_out);

  auto* sweep_cmd = app.add_subcommand("sweep", "comparative-statics table over (a1, p)");
  std::string sw_env, sw_a1 = "0:0.6:13", sw_p = "0:4:17", sw_out;
  bool sw_fig1 = false;
  sweep_cmd->add_option("--env", sw_env, "template env (default E1-style)");
  sweep_cmd->add_option("--a1", sw_a1, "a1 grid lo:hi:n");
  sweep_cmd->add_option("--p", sw_p, "p grid lo:hi:n");
  sweep_cmd->add_flag("--figure1", sw_fig1, "emit only (a1, p, G) triplets");
  sweep_cmd->add_option("--out", sw_out);

  auto* el = app.add_subcommand("el-check", "Euler-Lagrange residual profile");
  std::string el_env, el_scheme, el_out;
  double el_beta = 0.0;
  int el_points = 50;
  el->add_option("--beta", el_beta, "average-price weight")->required();
  el->add_option("--env", el_env)->required();
  el->add_option("--scheme", el_scheme)->required();
  el->add_option("--points", el_points, "residual sample count");
  el->add_option("--out", el_out);

  auto* block = app.add_subcommand("block-compare", "flat vs two-tier aggregate consumption");
  std::string bl_env, bl_grid = "0:1:5", bl_out;
  double bl_p1 = 0, bl_p2 = 0, bl_p3 = 0, bl_qbar = 0;
  block->add_option("--env", bl_env)->required();
  block->add_option("--p1", bl_p1)->required();
  block->add_option("--p2", bl_p2)->required();
  block->add_option("--p3", bl_p3)->required();
  block->add_option("--qbar", bl_qbar)->required();
  block->add_option("--lambda-grid", bl_grid, "lambda grid lo:hi:n");
  block->add_option("--out", bl_out);

  auto* dyn = app.add_subcommand("dynamics", "adjustment-dynamic trajectory");
  std::string dy_env, dy_scheme, dy_out;
  double dy_theta = 0, dy_q0 = 0.1, dy_gain = 1.0, dy_step = 0.1;
  int dy_max = 200000;
  dyn->add_option("--env", dy_env)->required();
  dyn->add_option("--scheme", dy_scheme)->required();
  dyn->add_option("--theta", dy_theta)->required();
  dyn->add_option("--q0", dy_q0, "starting quantity (> 0)");
  dyn->add_option("--gain", dy_gain);
  dyn->add_option("--step", dy_step);
  dyn->add_option("--max-steps", dy_max);
  dyn->add_option("--out", dy_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*optimize) {
      return run_optimize(opt_env, opt_objective, opt_oracle, opt_out, seed);
    }
    if (*welfare) return run_welfare(wel_env, wel_scheme, wel_lambda, wel_out);
    if (*sweep_cmd) return run_sweep(sw_env, sw_a1, sw_p, sw_fig1, sw_out, seed);
    if (*el) return run_el_check(el_env, el_scheme, el_beta, el_points, el_out);
    if (*block) {
      return run_block_compare(bl_env, bl_p1, bl_p2, bl_p3, bl_qbar, bl_grid,
                               bl_out);
    }
    if (*dyn) {
      return run_dynamics(dy_env, dy_scheme, dy_theta, dy_q0, dy_gain, dy_step,
                          dy_max, dy_out);
    }
  } catch (const OracleDisagreementError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
