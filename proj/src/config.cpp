#include "nlpricing/config.hpp"

#include <fstream>
#include <sstream>

#include "nlpricing/errors.hpp"

namespace nlpricing {

namespace {

double require_number(const nlohmann::json& j, const char* field,
                      const std::string& context) {
  if (!j.contains(field) || !j[field].is_number()) {
    throw ConfigError(context + ": missing or non-numeric field '" + field + "'");
  }
  return j[field].get<double>();
}

std::vector<double> require_array(const nlohmann::json& j, const char* field,
                                  const std::string& context) {
  if (!j.contains(field) || !j[field].is_array()) {
    throw ConfigError(context + ": missing or non-array field '" + field + "'");
  }
  std::vector<double> out;
  for (const auto& v : j[field]) {
    if (!v.is_number()) {
      throw ConfigError(context + ": field '" + field + "' has a non-numeric entry");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::string require_kind(const nlohmann::json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ConfigError(context + ": missing string field 'kind'");
  }
  return j["kind"].get<std::string>();
}

}  // namespace

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error in ") + path + ": " +
                      e.what());
  }
}

PerceptionKernel parse_kernel(const nlohmann::json& j) {
  const std::string kind = require_kind(j, "kernel");
  if (kind == "dirac0") return PerceptionKernel::dirac0();
  if (kind == "uniform") return PerceptionKernel::uniform();
  if (kind == "mixdirac") {
    return PerceptionKernel::mix_dirac(require_number(j, "lambda", "kernel"));
  }
  if (kind == "betamix") {
    return PerceptionKernel::beta_mix(require_number(j, "beta", "kernel"));
  }
  if (kind == "custom") {
    return PerceptionKernel::custom(require_array(j, "nodes", "kernel"),
                                    require_array(j, "weights", "kernel"));
  }
  throw ConfigError("kernel: unknown kind '" + kind + "'");
}

PriceScheme parse_scheme(const nlohmann::json& j) {
  const std::string kind = require_kind(j, "scheme");
  PriceScheme scheme;
  if (kind == "quadratic") {
    scheme = Quadratic{require_number(j, "A", "scheme"),
                       require_number(j, "B", "scheme")};
  } else if (kind == "flat") {
    scheme = Flat{require_number(j, "p1", "scheme")};
  } else if (kind == "twotier") {
    scheme = TwoTier{require_number(j, "p2", "scheme"),
                     require_number(j, "p3", "scheme"),
                     require_number(j, "qbar", "scheme")};
  } else if (kind == "piecewise") {
    scheme = PiecewiseLinear{require_array(j, "breakpoints", "scheme"),
                             require_array(j, "slopes", "scheme")};
  } else {
    throw ConfigError("scheme: unknown kind '" + kind + "'");
  }
  try {
    validate(scheme);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("scheme: ") + e.what());
  }
  return scheme;
}

MarketEnv parse_env(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("env: expected an object");
  Preferences prefs;
  prefs.h1 = require_number(j, "h1", "env");
  prefs.h2 = require_number(j, "h2", "env");
  if (!j.contains("kernel")) throw ConfigError("env: missing field 'kernel'");
  return MarketEnv::make(prefs, require_number(j, "c1", "env"),
                         require_number(j, "c2", "env"),
                         require_number(j, "theta0", "env"),
                         require_number(j, "theta1", "env"),
                         parse_kernel(j["kernel"]));
}

nlohmann::json kernel_to_json(const PerceptionKernel& kernel) {
  nlohmann::json j;
  j["kind"] = kernel.kind_name();
  switch (kernel.kind()) {
    case PerceptionKernel::Kind::mix_dirac:
      j["lambda"] = kernel.parameter();
      break;
    case PerceptionKernel::Kind::beta_mix:
      j["beta"] = kernel.parameter();
      break;
    case PerceptionKernel::Kind::custom: {
      std::vector<double> nodes, weights;
      for (const auto& a : kernel.atoms()) {
        nodes.push_back(a.frac);
        weights.push_back(a.weight);
      }
      j["nodes"] = nodes;
      j["weights"] = weights;
      break;
    }
    default:
      break;
  }
  return j;
}

nlohmann::json scheme_to_json(const PriceScheme& scheme) {
  nlohmann::json j;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          j["kind"] = "quadratic";
          j["A"] = s.A;
          j["B"] = s.B;
        } else if constexpr (std::is_same_v<T, Flat>) {
          j["kind"] = "flat";
          j["p1"] = s.p1;
        } else if constexpr (std::is_same_v<T, TwoTier>) {
          j["kind"] = "twotier";
          j["p2"] = s.p2;
          j["p3"] = s.p3;
          j["qbar"] = s.qbar;
        } else {
          j["kind"] = "piecewise";
          j["breakpoints"] = s.breakpoints;
          j["slopes"] = s.slopes;
        }
      },
      scheme);
  return j;
}

nlohmann::json env_to_json(const MarketEnv& env) {
  nlohmann::json j;
  j["theta0"] = env.theta0;
  j["theta1"] = env.theta1;
  j["h1"] = env.prefs.h1;
  j["h2"] = env.prefs.h2;
  j["c1"] = env.c1;
  j["c2"] = env.c2;
  j["kernel"] = kernel_to_json(env.kernel);
  return j;
}

std::vector<double> parse_grid_spec(const std::string& spec) {
  std::istringstream in(spec);
  std::string lo_s, hi_s, n_s;
  if (!std::getline(in, lo_s, ':') || !std::getline(in, hi_s, ':') ||
      !std::getline(in, n_s)) {
    throw ConfigError("grid spec must be 'lo:hi:n': " + spec);
  }
  double lo, hi;
  long n;
  try {
    lo = std::stod(lo_s);
    hi = std::stod(hi_s);
    n = std::stol(n_s);
  } catch (const std::exception&) {
    throw ConfigError("grid spec must be numeric 'lo:hi:n': " + spec);
  }
  if (n < 1) throw ConfigError("grid spec needs n >= 1: " + spec);
  std::vector<double> grid;
  if (n == 1) {
    grid.push_back(lo);
  } else {
    for (long i = 0; i < n; ++i) {
      grid.push_back(lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(n - 1));
    }
  }
  return grid;
}

}  // namespace nlpricing
