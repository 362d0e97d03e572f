#pragma once

// Run configuration for the command-line front end: a flat JSON schema whose
// keys mirror the long flag names, plus parsers for the compact --body and
// --domain flag syntaxes.

#include "gauge_certify/bodies.hpp"
#include "gauge_certify/registry.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gauge_certify {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string function = "quadratic";
  std::string expr;
  int dimension = 1;
  std::vector<double> domain{-1.0, 1.0};
  int resolution = 201;
  std::vector<double> lambdas{0.1, 0.01};
  int tilts = 5;
  std::vector<double> tilt_values;
  double tol = kSampledTol;
  std::optional<double> gap_tol;
  RegistryParams params;
  nlohmann::json body;  // null when absent
  std::vector<double> x0;
  std::vector<double> x0star;
  std::string out;
  std::string csv;
  std::uint64_t seed = 0;
  int random_tests = 0;
  // barrier
  std::vector<double> ray;
  int steps = 50;
  double scale = 1.0;
  // ekeland
  std::vector<double> start;
  double eps = 0.25;
  double ekeland_lambda = 1.0;
  // trace
  int n_max = 12;
  bool refine = true;
};

inline Point to_point(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> parse_number_list(const std::string& text,
                                             const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw ConfigError(what + ": empty entry in '" + text + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError(what + ": '" + item + "' is not a number");
    }
    if (used != item.size()) throw ConfigError(what + ": '" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(what + ": no values given");
  return out;
}

inline void validate(const RunConfig& c) {
  if (c.dimension < 1 || c.dimension > 3) {
    throw ConfigError("dimension must be 1, 2 or 3 (got " + std::to_string(c.dimension) + ")");
  }
  if (c.resolution < 2) throw ConfigError("resolution must be >= 2");
  if (c.domain.size() != 2 && c.domain.size() != 2 * static_cast<std::size_t>(c.dimension)) {
    throw ConfigError("domain needs 'lo,hi' or one 'lo,hi' pair per dimension");
  }
  for (std::size_t i = 0; i + 1 < c.domain.size(); i += 2) {
    if (!(c.domain[i] < c.domain[i + 1])) throw ConfigError("domain: need lo < hi");
  }
  if (c.lambdas.empty()) throw ConfigError("lambda schedule is empty");
  for (double l : c.lambdas) {
    if (!(l > 0.0)) throw ConfigError("lambda values must be > 0");
  }
  if (c.tilts < 1) throw ConfigError("tilts must be >= 1");
  if (!(c.tol > 0.0)) throw ConfigError("tol must be > 0");
  if (c.gap_tol && !(*c.gap_tol > 0.0)) throw ConfigError("gap_tol must be > 0");
  if (!(c.eps > 0.0)) throw ConfigError("eps must be > 0");
  if (!(c.ekeland_lambda > 0.0)) throw ConfigError("ekeland_lambda must be > 0");
  if (!(c.scale > 0.0)) throw ConfigError("scale must be > 0");
  if (c.steps < 1) throw ConfigError("steps must be >= 1");
  if (c.n_max < 1) throw ConfigError("nmax must be >= 1");
  if (c.function.empty() && c.expr.empty()) throw ConfigError("no function given");
  if (c.expr.empty() && !is_registry_name(c.function)) {
    throw ConfigError("unknown function '" + c.function +
                      "'; use one of quadratic, abs, neg_abs, cube, max_affine, "
                      "indicator_box, step or pass --expr");
  }
}

inline Box domain_box(const RunConfig& c) {
  const Eigen::Index n = c.dimension;
  Point lo(n);
  Point hi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t k = c.domain.size() == 2 ? 0 : 2 * static_cast<std::size_t>(i);
    lo(i) = c.domain[k];
    hi(i) = c.domain[k + 1];
  }
  return Box(lo, hi);
}

inline FunctionOracle make_function(const RunConfig& c) {
  try {
    if (!c.expr.empty()) return expression_function(c.expr, domain_box(c));
    return registry_function(c.function, domain_box(c), c.params);
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
}

namespace detail {

inline std::vector<double> json_numbers(const nlohmann::json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>()};
  if (j.is_string()) return parse_number_list(j.get<std::string>(), what);
  if (!j.is_array()) throw ConfigError(what + ": expected a number list");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(what + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline NormOrder parse_order(const nlohmann::json& p) {
  if (p.is_string()) {
    const auto s = p.get<std::string>();
    if (s == "inf" || s == "infinity") return NormOrder::Infinity;
    if (s == "1") return NormOrder::One;
    if (s == "2") return NormOrder::Two;
  } else if (p.is_number()) {
    const double v = p.get<double>();
    if (v == 1.0) return NormOrder::One;
    if (v == 2.0) return NormOrder::Two;
  }
  throw ConfigError("ball: p must be 1, 2 or \"inf\"");
}

}  // namespace detail

/// Builds a body from its JSON description:
///   {"type":"polytope","normals":[[...],...]}
///   {"type":"ball","r":1,"p":2}             (p in 1, 2, "inf")
///   {"type":"tube","p":[..],"q":[..],"delta":d[,"anchor":[..]]}
inline ConvexBody body_from_json(const nlohmann::json& j, Eigen::Index dimension) {
  if (!j.is_object() || !j.contains("type")) throw ConfigError("body: missing \"type\"");
  const auto type = j.at("type").get<std::string>();
  try {
    if (type == "polytope") {
      std::vector<Covector> normals;
      for (const auto& row : j.at("normals")) {
        normals.push_back(to_point(detail::json_numbers(row, "polytope normal")));
      }
      return ConvexBody::polytope(std::move(normals));
    }
    if (type == "ball") {
      const double r = j.value("r", 1.0);
      const NormOrder order = j.contains("p") ? detail::parse_order(j.at("p")) : NormOrder::Two;
      return ConvexBody::ball(dimension, r, order);
    }
    if (type == "tube") {
      const Point p = to_point(detail::json_numbers(j.at("p"), "tube p"));
      const Point q = to_point(detail::json_numbers(j.at("q"), "tube q"));
      const double delta = j.at("delta").get<double>();
      const Point anchor =
          j.contains("anchor") ? to_point(detail::json_numbers(j.at("anchor"), "tube anchor")) : p;
      return ConvexBody::tube(p, q, delta, anchor);
    }
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("body: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("body: ") + e.what());
  }
  throw ConfigError("body: unknown type '" + type + "' (polytope, ball, tube)");
}

/// Compact flag syntax: a JSON object, or
///   ball:R[:P]            tube:P1,..;Q1,..;DELTA
///   polytope:A11,A12;A21,A22;...
inline nlohmann::json body_spec_to_json(const std::string& spec) {
  if (!spec.empty() && spec.front() == '{') {
    try {
      return nlohmann::json::parse(spec);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("body: ") + e.what());
    }
  }
  const auto colon = spec.find(':');
  const std::string type = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
  };
  if (type == "ball") {
    const auto parts = split(rest, ':');
    if (parts.empty() || parts.size() > 2) throw ConfigError("body: expected ball:R[:P]");
    nlohmann::json j{{"type", "ball"}, {"r", parse_number_list(parts[0], "ball radius").at(0)}};
    if (parts.size() == 2) j["p"] = parts[1];
    return j;
  }
  if (type == "tube") {
    const auto parts = split(rest, ';');
    if (parts.size() != 3) throw ConfigError("body: expected tube:P;Q;DELTA");
    return {{"type", "tube"},
            {"p", parse_number_list(parts[0], "tube p")},
            {"q", parse_number_list(parts[1], "tube q")},
            {"delta", parse_number_list(parts[2], "tube delta").at(0)}};
  }
  if (type == "polytope") {
    nlohmann::json normals = nlohmann::json::array();
    for (const auto& row : split(rest, ';')) normals.push_back(parse_number_list(row, "polytope normal"));
    return {{"type", "polytope"}, {"normals", normals}};
  }
  throw ConfigError("body: unknown spec '" + spec + "' (ball:R[:P], tube:P;Q;D, polytope:A;B;..)");
}

/// Overlays the keys of a JSON config object onto cfg.
inline void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "function") cfg.function = v.get<std::string>();
      else if (key == "expr") cfg.expr = v.get<std::string>();
      else if (key == "dimension") cfg.dimension = v.get<int>();
      else if (key == "domain") cfg.domain = detail::json_numbers(v, "domain");
      else if (key == "resolution") cfg.resolution = v.get<int>();
      else if (key == "lambda") cfg.lambdas = detail::json_numbers(v, "lambda");
      else if (key == "tilts") cfg.tilts = v.get<int>();
      else if (key == "tilt_values") cfg.tilt_values = detail::json_numbers(v, "tilt_values");
      else if (key == "tol") cfg.tol = v.get<double>();
      else if (key == "gap_tol") cfg.gap_tol = v.get<double>();
      else if (key == "body") cfg.body = v.is_string() ? body_spec_to_json(v.get<std::string>()) : v;
      else if (key == "x0") cfg.x0 = detail::json_numbers(v, "x0");
      else if (key == "x0star") cfg.x0star = detail::json_numbers(v, "x0star");
      else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "csv") cfg.csv = v.get<std::string>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "random_tests") cfg.random_tests = v.get<int>();
      else if (key == "ray") cfg.ray = detail::json_numbers(v, "ray");
      else if (key == "steps") cfg.steps = v.get<int>();
      else if (key == "scale") cfg.scale = v.get<double>();
      else if (key == "start") cfg.start = detail::json_numbers(v, "start");
      else if (key == "eps") cfg.eps = v.get<double>();
      else if (key == "ekeland_lambda") cfg.ekeland_lambda = v.get<double>();
      else if (key == "nmax") cfg.n_max = v.get<int>();
      else if (key == "refine") cfg.refine = v.get<bool>();
      else if (key == "params") {
        if (v.contains("slopes")) {
          cfg.params.slopes.clear();
          for (const auto& row : v.at("slopes")) {
            cfg.params.slopes.push_back(to_point(detail::json_numbers(row, "slopes")));
          }
        }
        if (v.contains("intercepts")) cfg.params.intercepts = detail::json_numbers(v.at("intercepts"), "intercepts");
        if (v.contains("box")) {
          const auto b = detail::json_numbers(v.at("box"), "box");
          if (b.size() != 2) throw ConfigError("params.box: expected [lo, hi]");
          cfg.params.box_lo = b[0];
          cfg.params.box_hi = b[1];
        }
        if (v.contains("step_at")) cfg.params.step_at = v.at("step_at").get<double>();
      } else {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  apply_json(cfg, j);
}

}  // namespace gauge_certify
