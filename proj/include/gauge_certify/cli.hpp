#pragma once

// Command-line front end. run_cli() parses arguments, resolves the run
// configuration (defaults < --config file < flags) and dispatches to one of
// the subcommands certify, minty, barrier, ekeland, trace, graph.
//
// Exit codes: 0 certified-convex / related / success, 1 witnessed violation,
// 2 inconclusive, 64 configuration or input error.

#include "gauge_certify/config.hpp"
#include "gauge_certify/report_json.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace gauge_certify {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitConfig = 64;

namespace cli_detail {

inline std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("gauge_certify", sink);
  log->set_pattern("[%l] %v");
  const char* env = std::getenv("GAUGE_CERTIFY_LOG");
  const std::string level = env ? env : "quiet";
  if (level == "debug") {
    log->set_level(spdlog::level::debug);
  } else if (level == "info") {
    log->set_level(spdlog::level::info);
  } else {
    log->set_level(spdlog::level::warn);
  }
  return log;
}

inline std::string format_number(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

struct Outputs {
  std::ostream& out;
  std::ostream& err;
  std::shared_ptr<spdlog::logger> log;
};

inline void emit(const RunConfig& cfg, Outputs& io, const std::string& text) {
  if (cfg.out.empty()) {
    io.out << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + cfg.out + "'");
  f << text;
  io.log->info("wrote {}", cfg.out);
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline Point require_vector(const std::vector<double>& v, Eigen::Index dim,
                            const std::string& flag) {
  if (v.empty()) throw ConfigError(flag + " is required for this subcommand");
  if (static_cast<Eigen::Index>(v.size()) != dim) {
    throw ConfigError(flag + ": expected " + std::to_string(dim) + " coordinates, got " +
                      std::to_string(v.size()));
  }
  return to_point(v);
}

inline SamplingOptions sampling_options(const RunConfig& cfg) {
  SamplingOptions s;
  s.grid = Grid::uniform(domain_box(cfg), cfg.resolution);
  s.lambdas = cfg.lambdas;
  s.tilt_count = cfg.tilts;
  if (!cfg.tilt_values.empty()) s.tilts = tilts_from_values(cfg.dimension, cfg.tilt_values);
  return s;
}

// Uniform points in the domain box from a 64-bit Mersenne twister; the
// mapping to [0,1) is done by hand so output does not depend on the
// standard library's distribution implementation.
inline std::vector<Point> random_points(const Box& box, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point> pts;
  for (int i = 0; i < count; ++i) {
    Point p(box.dimension());
    for (Eigen::Index a = 0; a < box.dimension(); ++a) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      p(a) = box.lower(a) + u * (box.upper(a) - box.lower(a));
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

inline int run_certify(const RunConfig& cfg, Outputs& io) {
  const FunctionOracle f = make_function(cfg);
  CertifyOptions opt;
  opt.sampling = sampling_options(cfg);
  opt.monotone_tol = cfg.tol;
  opt.gap_tol = cfg.gap_tol;
  if (cfg.random_tests > 0) {
    opt.test_points = opt.sampling.grid.points();
    for (auto& p : random_points(domain_box(cfg), cfg.random_tests, cfg.seed)) {
      opt.test_points.push_back(std::move(p));
    }
  }
  io.log->info("certify {} on {} grid nodes", f.name, opt.sampling.grid.size());
  const CertificationReport rep = certify_convexity(f, opt);
  nlohmann::json j = to_json(rep);
  j["function"] = f.name;
  j["seed"] = cfg.seed;
  emit(cfg, io, dump(j));
  switch (rep.verdict) {
    case Verdict::CertifiedConvex: return kExitOk;
    case Verdict::NonconvexWitnessed: return kExitViolation;
    case Verdict::Inconclusive: return kExitInconclusive;
  }
  return kExitInconclusive;
}

inline int run_minty(const RunConfig& cfg, Outputs& io) {
  const FunctionOracle f = make_function(cfg);
  const Point x0 = require_vector(cfg.x0, cfg.dimension, "--x0");
  const Point x0star = require_vector(cfg.x0star, cfg.dimension, "--x0star");
  SubgradientGraph graph;
  try {
    graph = sample_graph(f, sampling_options(cfg));
  } catch (const EmptyGraph& e) {
    io.log->warn("{}", e.what());
  }
  const MintyResult r = minty_test(graph, x0, x0star, cfg.tol);
  nlohmann::json j = to_json(r);
  j["function"] = f.name;
  j["graph_size"] = graph.size();

  // Cross-check the predicted Fenchel membership on the sampled points.
  nlohmann::json fen{{"checked", false}, {"holds", nullptr},
                     {"worst_violation", nullptr}, {"witness", nullptr}};
  const double fx0 = f(x0);
  j["x0_in_domain"] = std::isfinite(fx0);
  if (std::isfinite(fx0) && !graph.empty()) {
    std::vector<Point> verification;
    for (const auto& s : graph.samples) verification.push_back(s.x);
    const MembershipCertificate c = fenchel_membership(f, x0, x0star, verification, cfg.tol);
    fen = {{"checked", true},
           {"holds", c.holds},
           {"worst_violation", json_number(c.worst_violation)},
           {"witness", c.witness ? json_vector(*c.witness) : nlohmann::json(nullptr)}};
  }
  j["fenchel"] = fen;
  emit(cfg, io, dump(j));
  return r.related ? kExitOk : kExitViolation;
}

inline ConvexBody require_body(const RunConfig& cfg, Eigen::Index dim) {
  if (cfg.body.is_null()) throw ConfigError("--body is required for this subcommand");
  ConvexBody body = body_from_json(cfg.body, dim);
  if (body.dimension() != dim) {
    throw ConfigError("body dimension " + std::to_string(body.dimension()) +
                      " does not match dimension " + std::to_string(dim));
  }
  return body;
}

inline int run_barrier(const RunConfig& cfg, Outputs& io) {
  const Eigen::Index dim = cfg.ray.empty() ? cfg.dimension : static_cast<Eigen::Index>(cfg.ray.size());
  const Barrier bar(require_body(cfg, dim), cfg.scale);
  Point ray = Point::Zero(dim);
  if (cfg.ray.empty()) {
    ray(0) = 1.0;
  } else {
    ray = to_point(cfg.ray);
  }
  const double mu_ray = gauge(bar.body(), ray).value;
  if (!(mu_ray > 0.0)) throw ConfigError("--ray must be a nonzero direction");
  const Point boundary = ray / mu_ray;

  std::ostringstream csv;
  csv << "t";
  for (Eigen::Index a = 0; a < dim; ++a) csv << ",x" << (a + 1);
  csv << ",mu,k\n";
  for (int i = 0; i < cfg.steps; ++i) {
    const double t = static_cast<double>(i) / cfg.steps;
    const Point x = t * boundary;
    csv << format_number(t);
    for (Eigen::Index a = 0; a < dim; ++a) csv << "," << format_number(x(a));
    csv << "," << format_number(gauge(bar.body(), x).value) << ","
        << format_number(barrier_eval(bar, x)) << "\n";
  }
  emit(cfg, io, csv.str());
  return kExitOk;
}

inline int run_ekeland(const RunConfig& cfg, Outputs& io) {
  const FunctionOracle f = make_function(cfg);
  const Point start = require_vector(cfg.start, cfg.dimension, "--start");
  const SearchGrid grid = make_search_grid(f, Grid::uniform(domain_box(cfg), cfg.resolution));
  const EkelandResult r = ekeland(f, grid, start, cfg.eps, cfg.ekeland_lambda);
  const EkelandCheck c = verify_ekeland(r, grid);
  nlohmann::json j = to_json(r, c);
  j["function"] = f.name;
  j["grid_points"] = grid.size();
  emit(cfg, io, dump(j));
  return c.all() ? kExitOk : kExitViolation;
}

inline std::string trace_csv(const TraceRecord& t) {
  const Eigen::Index dim = t.anchor.size();
  std::ostringstream csv;
  csv << "n,eps";
  for (const char* name : {"x", "xstar", "y", "ystar"}) {
    for (Eigen::Index a = 0; a < dim; ++a) csv << "," << name << (a + 1);
  }
  csv << ",gap_xy,value,inf_estimate,pairing,pairing_bound,slack,prox_lambda,spacing\n";
  for (const auto& s : t.iterations) {
    csv << s.n << "," << format_number(s.eps);
    for (const Eigen::VectorXd* v : {&s.x, &s.xstar, &s.y, &s.ystar}) {
      for (Eigen::Index a = 0; a < dim; ++a) csv << "," << format_number((*v)(a));
    }
    for (double v : {s.gap_xy, s.value, s.inf_estimate, s.pairing, s.pairing_bound, s.slack,
                     s.prox_lambda, s.spacing}) {
      csv << "," << format_number(v);
    }
    csv << "\n";
  }
  return csv.str();
}

inline int run_trace(const RunConfig& cfg, Outputs& io) {
  const FunctionOracle f = make_function(cfg);
  const Eigen::Index dim = cfg.dimension;
  const Point center = cfg.x0.empty() ? Point::Zero(dim) : require_vector(cfg.x0, dim, "--x0");
  const Covector linear =
      cfg.x0star.empty() ? Covector::Zero(dim) : require_vector(cfg.x0star, dim, "--x0star");
  const BarrierTerm g(Barrier(require_body(cfg, dim), cfg.scale), center, linear);
  TraceOptions opt;
  opt.n_max = cfg.n_max;
  opt.resolution = cfg.resolution;
  opt.refine = cfg.refine;
  const TraceRecord t = lemma_trace(f, g, center, opt);
  for (const auto& w : t.warnings) io.log->warn("{}", w);
  if (!cfg.csv.empty()) {
    std::ofstream out(cfg.csv, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + cfg.csv + "'");
    out << trace_csv(t);
  }
  nlohmann::json j = trace_summary_json(t);
  j["function"] = f.name;
  emit(cfg, io, dump(j));
  return t.converged ? kExitOk : kExitInconclusive;
}

inline int run_graph(const RunConfig& cfg, Outputs& io) {
  const FunctionOracle f = make_function(cfg);
  SubgradientGraph graph;
  try {
    graph = sample_graph(f, sampling_options(cfg));
  } catch (const EmptyGraph& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitInconclusive;
  }
  const Eigen::Index dim = graph.dimension();
  std::ostringstream csv;
  for (Eigen::Index a = 0; a < dim; ++a) csv << (a ? "," : "") << "x" << (a + 1);
  for (Eigen::Index a = 0; a < dim; ++a) csv << ",xstar" << (a + 1);
  csv << ",fx\n";
  for (const auto& s : graph.samples) {
    for (Eigen::Index a = 0; a < dim; ++a) csv << (a ? "," : "") << format_number(s.x(a));
    for (Eigen::Index a = 0; a < dim; ++a) csv << "," << format_number(s.xstar(a));
    csv << "," << format_number(s.fx) << "\n";
  }
  emit(cfg, io, csv.str());
  return kExitOk;
}

}  // namespace cli_detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convexity certification and barrier-function diagnostics", "gauge_certify"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, function, expr, domain, lambda, tilt_values, body, x0, x0star,
      out_path, csv_path, ray, start;
  int dimension = 0, resolution = 0, tilts = 0, steps = 0, n_max = 0, random_tests = 0;
  double tol = 0, gap_tol = 0, scale = 0, eps = 0, ekeland_lambda = 0;
  std::uint64_t seed = 0;
  bool no_refine = false;

  app.add_option("--config", config_path, "JSON config file; flags override its keys");
  auto* o_function = app.add_option("--function", function, "registry function name");
  auto* o_expr = app.add_option("--expr", expr, "custom expression in x, y, z");
  auto* o_dimension = app.add_option("--dimension", dimension, "dimension 1-3");
  auto* o_domain = app.add_option("--domain", domain, "lo,hi or lo1,hi1,lo2,hi2,...");
  auto* o_resolution = app.add_option("--resolution", resolution, "grid nodes per axis");
  auto* o_lambda = app.add_option("--lambda", lambda, "proximal parameters, comma separated");
  auto* o_tilts = app.add_option("--tilts", tilts, "tilts per axis");
  auto* o_tilt_values = app.add_option("--tilt-values", tilt_values, "explicit tilts per axis");
  auto* o_tol = app.add_option("--tol", tol, "monotonicity / relation tolerance");
  auto* o_gap_tol = app.add_option("--gap-tol", gap_tol, "envelope gap tolerance");
  auto* o_body = app.add_option("--body", body, "ball:R[:P], tube:P;Q;D, polytope:A;B;.. or JSON");
  auto* o_x0 = app.add_option("--x0", x0, "point x0 (minty) or barrier center (trace)");
  auto* o_x0star = app.add_option("--x0star", x0star, "covector x0*");
  auto* o_out = app.add_option("--out", out_path, "write the main output here");
  auto* o_csv = app.add_option("--csv", csv_path, "trace CSV side artifact");
  auto* o_seed = app.add_option("--seed", seed, "seed for random test points");
  auto* o_random = app.add_option("--random-tests", random_tests, "extra random test points");
  auto* o_ray = app.add_option("--ray", ray, "barrier ray direction");
  auto* o_steps = app.add_option("--steps", steps, "barrier samples along the ray");
  auto* o_scale = app.add_option("--scale", scale, "barrier scale a");
  auto* o_start = app.add_option("--start", start, "Ekeland start point");
  auto* o_eps = app.add_option("--eps", eps, "Ekeland epsilon");
  auto* o_ek_lambda = app.add_option("--ekeland-lambda", ekeland_lambda, "Ekeland radius");
  auto* o_nmax = app.add_option("--nmax", n_max, "trace length");
  app.add_flag("--no-refine", no_refine, "keep the trace grid fixed");

  std::string command;
  for (const char* name : {"certify", "minty", "barrier", "ekeland", "trace", "graph"}) {
    app.add_subcommand(name)->fallthrough()->callback([&command, name] { command = name; });
  }
  app.get_subcommand("certify")->description("monotone => convex certification report (JSON)");
  app.get_subcommand("minty")->description("monotone-relation test of (x0, x0*) (JSON)");
  app.get_subcommand("barrier")->description("gauge and barrier values along a ray (CSV)");
  app.get_subcommand("ekeland")->description("grid Ekeland point from --start (JSON)");
  app.get_subcommand("trace")->description("sequence construction diagnostics (JSON + CSV)");
  app.get_subcommand("graph")->description("sampled subgradient graph (CSV)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  cli_detail::Outputs io{out, err, cli_detail::make_logger(err)};
  try {
    RunConfig cfg;
    bool dimension_given = false;
    if (!config_path.empty()) {
      load_config_file(cfg, config_path);
      std::ifstream in(config_path);
      dimension_given = nlohmann::json::parse(in).contains("dimension");
    }
    auto set = [](const CLI::Option* o) { return o->count() > 0; };
    if (set(o_function)) cfg.function = function;
    if (set(o_expr)) cfg.expr = expr;
    if (set(o_dimension)) {
      cfg.dimension = dimension;
      dimension_given = true;
    }
    if (set(o_domain)) cfg.domain = parse_number_list(domain, "--domain");
    if (set(o_resolution)) cfg.resolution = resolution;
    if (set(o_lambda)) cfg.lambdas = parse_number_list(lambda, "--lambda");
    if (set(o_tilts)) cfg.tilts = tilts;
    if (set(o_tilt_values)) cfg.tilt_values = parse_number_list(tilt_values, "--tilt-values");
    if (set(o_tol)) cfg.tol = tol;
    if (set(o_gap_tol)) cfg.gap_tol = gap_tol;
    if (set(o_body)) cfg.body = body_spec_to_json(body);
    if (set(o_x0)) cfg.x0 = parse_number_list(x0, "--x0");
    if (set(o_x0star)) cfg.x0star = parse_number_list(x0star, "--x0star");
    if (set(o_out)) cfg.out = out_path;
    if (set(o_csv)) cfg.csv = csv_path;
    if (set(o_seed)) cfg.seed = seed;
    if (set(o_random)) cfg.random_tests = random_tests;
    if (set(o_ray)) cfg.ray = parse_number_list(ray, "--ray");
    if (set(o_steps)) cfg.steps = steps;
    if (set(o_scale)) cfg.scale = scale;
    if (set(o_start)) cfg.start = parse_number_list(start, "--start");
    if (set(o_eps)) cfg.eps = eps;
    if (set(o_ek_lambda)) cfg.ekeland_lambda = ekeland_lambda;
    if (set(o_nmax)) cfg.n_max = n_max;
    if (no_refine) cfg.refine = false;
    if (set(o_expr) && !set(o_function)) cfg.function.clear();

    if (!dimension_given) {
      for (const auto* v : {&cfg.x0, &cfg.start, &cfg.x0star}) {
        if (!v->empty()) {
          cfg.dimension = static_cast<int>(v->size());
          break;
        }
      }
    }
    validate(cfg);
    io.log->debug("command {} function {} dimension {}", command,
                  cfg.expr.empty() ? cfg.function : cfg.expr, cfg.dimension);

    if (command == "certify") return cli_detail::run_certify(cfg, io);
    if (command == "minty") return cli_detail::run_minty(cfg, io);
    if (command == "barrier") return cli_detail::run_barrier(cfg, io);
    if (command == "ekeland") return cli_detail::run_ekeland(cfg, io);
    if (command == "trace") return cli_detail::run_trace(cfg, io);
    if (command == "graph") return cli_detail::run_graph(cfg, io);
    err << "error: unknown subcommand\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
  } catch (const OutOfDomain& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitConfig;
}

inline int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace gauge_certify
