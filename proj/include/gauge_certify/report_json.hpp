#pragma once

// JSON encodings of the report types. Non-finite numbers are written as null.

#include "gauge_certify/certify.hpp"
#include "gauge_certify/variational.hpp"

#include <json.hpp>

namespace gauge_certify {

inline nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

inline nlohmann::json json_vector(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(json_number(v(i)));
  return a;
}

inline nlohmann::json to_json(const GraphSample& s) {
  return {{"x", json_vector(s.x)}, {"xstar", json_vector(s.xstar)}, {"fx", json_number(s.fx)}};
}

inline nlohmann::json to_json(const MonotonicityReport& r) {
  nlohmann::json j{{"verdict", r.monotone() ? "monotone" : "violated"},
                   {"worst_value", json_number(r.worst_value)},
                   {"worst_pair", nullptr}};
  if (r.worst_pair) j["worst_pair"] = {to_json(r.worst_pair->first), to_json(r.worst_pair->second)};
  return j;
}

inline nlohmann::json to_json(const CertificationReport& r) {
  nlohmann::json j;
  j["verdict"] = to_string(r.verdict);
  j["graph_size"] = r.graph_size;
  j["sampled_size"] = r.sampled_size;
  j["worst_pair"] = nullptr;
  j["worst_value"] = nullptr;
  if (r.monotonicity) {
    j["monotonicity"] = to_json(*r.monotonicity);
    j["worst_value"] = json_number(r.monotonicity->worst_value);
    if (r.monotonicity->worst_pair) {
      j["worst_pair"] = {{"first", to_json(r.monotonicity->worst_pair->first)},
                         {"second", to_json(r.monotonicity->worst_pair->second)}};
    }
  }
  j["envelope_gap"] = json_number(r.envelope_gap);
  j["gap_witness"] = r.gap_witness ? json_vector(*r.gap_witness) : nlohmann::json(nullptr);
  j["envelope_excess"] = json_number(r.envelope_excess);
  j["excess_witness"] = r.excess_witness ? json_vector(*r.excess_witness) : nlohmann::json(nullptr);
  j["gap_tol"] = json_number(r.gap_tol);
  j["lipschitz_estimate"] = json_number(r.lipschitz_estimate);
  j["spacing"] = json_number(r.spacing);
  j["tested_points"] = r.tested_points;
  j["skipped_points"] = r.skipped_points;
  j["diagnostics"] = r.diagnostics;
  return j;
}

inline nlohmann::json to_json(const MintyResult& r) {
  nlohmann::json j{{"related", r.related},
                   {"worst_value", json_number(r.worst_value)},
                   {"witness", nullptr},
                   {"warning", nullptr}};
  if (r.witness) j["witness"] = to_json(*r.witness);
  if (r.warning) j["warning"] = *r.warning;
  return j;
}

inline nlohmann::json to_json(const EkelandResult& r, const EkelandCheck& c) {
  return {{"y", json_vector(r.y)},
          {"fy", json_number(r.fy)},
          {"eps", r.eps},
          {"lambda", r.lambda},
          {"start", json_vector(r.start)},
          {"fstart", json_number(r.fstart)},
          {"moves", r.moves},
          {"guarantees",
           {{"descent", c.descent},
            {"localized", c.localized},
            {"perturbed_minimum", c.perturbed_minimum}}}};
}

inline nlohmann::json trace_summary_json(const TraceRecord& t) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : t.iterations) {
    steps.push_back({{"n", s.n},
                     {"eps", s.eps},
                     {"gap_xy", json_number(s.gap_xy)},
                     {"value", json_number(s.value)},
                     {"inf_estimate", json_number(s.inf_estimate)},
                     {"pairing", json_number(s.pairing)},
                     {"pairing_bound", json_number(s.pairing_bound)},
                     {"slack", json_number(s.slack)}});
  }
  const auto& last = t.iterations.back();
  return {{"converged", t.converged},
          {"anchor", json_vector(t.anchor)},
          {"M", json_number(t.M)},
          {"inf_estimate", json_number(t.inf_estimate)},
          {"steps", t.iterations.size()},
          {"final",
           {{"x", json_vector(last.x)},
            {"xstar", json_vector(last.xstar)},
            {"y", json_vector(last.y)},
            {"ystar", json_vector(last.ystar)},
            {"gap_xy", json_number(last.gap_xy)},
            {"pairing", json_number(last.pairing)}}},
          {"max_slack", json_number(t.max_slack())},
          {"iterations", steps},
          {"warnings", t.warnings}};
}

}  // namespace gauge_certify
