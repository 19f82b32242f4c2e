#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nlpricing/market.hpp"

namespace nlpricing {

// JSON configuration blocks. One file may carry "env", "scheme", "kernel"
// and "grid" sections:
//
//   {
//     "env":    {"theta0":0,"theta1":1,"h1":0,"h2":1,"c1":0,"c2":1,
//                "kernel":{"kind":"uniform"}},
//     "scheme": {"kind":"quadratic","A":4,"B":0},
//     "grid":   {"a1":"0:0.6:13","p":"0:4:17"}
//   }
//
// kernel kinds: dirac0 | uniform | mixdirac{lambda} | betamix{beta}
//               | custom{nodes[],weights[]}
// scheme kinds: quadratic{A,B} | flat{p1} | twotier{p2,p3,qbar}
//               | piecewise{breakpoints[],slopes[]}

nlohmann::json load_config_file(const std::string& path);

PerceptionKernel parse_kernel(const nlohmann::json& j);
PriceScheme parse_scheme(const nlohmann::json& j);
MarketEnv parse_env(const nlohmann::json& j);

nlohmann::json kernel_to_json(const PerceptionKernel& kernel);
nlohmann::json scheme_to_json(const PriceScheme& scheme);
nlohmann::json env_to_json(const MarketEnv& env);

// "lo:hi:n" -> n evenly spaced values (n >= 1; n == 1 gives {lo}).
std::vector<double> parse_grid_spec(const std::string& spec);

}  // namespace nlpricing
