#pragma once

#include "gauge_certify/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gauge_certify {

inline constexpr double kAnalyticTol = 1e-9;
inline constexpr double kSampledTol = 1e-6;

/// A proper lsc extended-real-valued function on R^n.
struct FunctionOracle {
  std::string name;
  std::function<double(const Point&)> eval;
  // Optional: a finite set of subgradients at a point (may be empty where
  // the subdifferential is empty).
  std::function<std::vector<Covector>(const Point&)> analytic_subgrad;
  Box domain_hint;

  Eigen::Index dimension() const { return domain_hint.dimension(); }
  bool has_analytic_subgradient() const {
    return static_cast<bool>(analytic_subgrad);
  }

  double operator()(const Point& x) const {
    const double v = eval(x);
    if (std::isnan(v) || v == -kInf) {
      throw InvalidInput("function '" + name + "' returned NaN or -inf");
    }
    return v;
  }
};

struct GraphSample {
  Point x;
  Covector xstar;
  double fx;
};

/// Finite sample of the graph of a subdifferential.
struct SubgradientGraph {
  std::vector<GraphSample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  Eigen::Index dimension() const {
    return samples.empty() ? 0 : samples.front().x.size();
  }
};

struct MembershipCertificate {
  bool holds = true;
  // max over the grid of <x*, y - x> - (f(y) - f(x)); -inf for an empty check
  double worst_violation = -kInf;
  std::optional<Point> witness;

  explicit operator bool() const { return holds; }
};

/// Grid-restricted Fenchel test: <x*, y - x> <= f(y) - f(x) + tol for every
/// grid point y with f(y) finite.
inline MembershipCertificate fenchel_membership(const FunctionOracle& f,
                                                const Point& x,
                                                const Covector& xstar,
                                                std::span<const Point> grid,
                                                double tol) {
  const double fx = f(x);
  if (!std::isfinite(fx)) {
    throw InvalidInput("fenchel_membership: f(x) is not finite");
  }
  require_dimension(xstar, x.size(), "fenchel_membership covector");
  if (grid.empty()) throw InvalidInput("fenchel_membership: empty grid");
  MembershipCertificate cert;
  for (const Point& y : grid) {
    const double fy = f(y);
    if (!std::isfinite(fy)) continue;
    const double violation = xstar.dot(y - x) - (fy - fx);
    if (violation > cert.worst_violation) {
      cert.worst_violation = violation;
      if (violation > tol) cert.witness = y;
    }
  }
  cert.holds = !(cert.worst_violation > tol);
  if (cert.holds) cert.witness.reset();
  return cert;
}

/// Function values cached on the nodes of a grid.
struct SampledFunction {
  Grid grid;
  std::vector<Point> nodes;
  std::vector<double> values;
};

inline SampledFunction sample_function(const FunctionOracle& f, const Grid& grid) {
  SampledFunction s{grid, grid.points(), {}};
  s.values.reserve(s.nodes.size());
  for (const auto& p : s.nodes) s.values.push_back(f(p));
  return s;
}

/// Largest finite difference quotient between axis-neighbouring nodes.
inline double empirical_lipschitz(const SampledFunction& s) {
  const auto& counts = s.grid.counts();
  const auto dim = static_cast<std::size_t>(s.grid.dimension());
  double L = 0.0;
  std::size_t stride = 1;
  for (std::size_t axis = dim; axis-- > 0;) {
    const auto c = static_cast<std::size_t>(counts[axis]);
    const double h = s.grid.spacing(static_cast<Eigen::Index>(axis));
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if ((i / stride) % c == c - 1) continue;
      const double a = s.values[i];
      const double b = s.values[i + stride];
      if (std::isfinite(a) && std::isfinite(b)) {
        L = std::max(L, std::abs(b - a) / h);
      }
    }
    stride *= c;
  }
  return L;
}

/// Local refinement around a grid incumbent: `passes` rounds, each laying
/// 2*half_nodes+1 nodes per axis over +-(current spacing) and shrinking the
/// spacing by half_nodes.
struct RefineOptions {
  int half_nodes = 10;
  int passes = 4;

  static RefineOptions for_dimension(Eigen::Index n) {
    if (n <= 1) return {10, 4};
    if (n == 2) return {10, 5};
    return {4, 10};
  }
};

struct ProximalPair {
  Point point;
  Covector subgradient;
  double value;  // f(point)
};

namespace detail {

inline double prox_objective(double fy, const Point& y, const Point& x,
                             const Covector& tilt, double lambda) {
  if (!std::isfinite(fy)) return kInf;
  return fy - tilt.dot(y) + (y - x).squaredNorm() / (2.0 * lambda);
}

inline void for_each_local_node(const Point& center, const Point& step, int half,
                                const Box& box,
                                const std::function<void(const Point&)>& visit) {
  const Eigen::Index n = center.size();
  const int width = 2 * half + 1;
  std::size_t total = 1;
  for (Eigen::Index a = 0; a < n; ++a) total *= static_cast<std::size_t>(width);
  Point y(n);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    bool inside = true;
    for (Eigen::Index a = n - 1; a >= 0; --a) {
      const int k = static_cast<int>(c % static_cast<std::size_t>(width)) - half;
      c /= static_cast<std::size_t>(width);
      y(a) = center(a) + static_cast<double>(k) * step(a);
      if (y(a) < box.lower(a) || y(a) > box.upper(a)) inside = false;
    }
    if (inside) visit(y);
  }
}

}  // namespace detail

/**
 * Tilted proximal step on a grid.
 *
 * Minimizes y -> f(y) - <tilt, y> + |y - x|^2 / (2 lambda) exhaustively over
 * the cached grid values, refines locally, and returns the pair
 * (p, tilt + (x - p)/lambda). Returns nullopt when the minimizer sits on the
 * boundary of the grid box, where the penalty has not localized it.
 */
inline std::optional<ProximalPair> proximal_subgradient(
    const FunctionOracle& f, const SampledFunction& sampled, const Point& x,
    double lambda, const Covector& tilt, const RefineOptions& refine) {
  if (!(lambda > 0.0)) throw InvalidInput("proximal_subgradient: lambda must be > 0");
  const Grid& grid = sampled.grid;
  require_dimension(x, grid.dimension(), "proximal_subgradient base point");
  require_dimension(tilt, grid.dimension(), "proximal_subgradient tilt");

  std::size_t best = sampled.nodes.size();
  double best_val = kInf;
  for (std::size_t i = 0; i < sampled.nodes.size(); ++i) {
    const double v =
        detail::prox_objective(sampled.values[i], sampled.nodes[i], x, tilt, lambda);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best == sampled.nodes.size()) return std::nullopt;

  Point p = sampled.nodes[best];
  double fp = sampled.values[best];
  Point step(grid.dimension());
  for (Eigen::Index a = 0; a < grid.dimension(); ++a) step(a) = grid.spacing(a);

  for (int pass = 0; pass < refine.passes; ++pass) {
    step /= static_cast<double>(refine.half_nodes);
    const Point center = p;
    detail::for_each_local_node(center, step, refine.half_nodes, grid.box(),
                                [&](const Point& y) {
                                  const double fy = f(y);
                                  const double v = detail::prox_objective(
                                      fy, y, x, tilt, lambda);
                                  if (v < best_val) {
                                    best_val = v;
                                    p = y;
                                    fp = fy;
                                  }
                                });
  }

  for (Eigen::Index a = 0; a < grid.dimension(); ++a) {
    const double guard = 0.5 * step(a);
    if (p(a) <= grid.box().lower(a) + guard || p(a) >= grid.box().upper(a) - guard) {
      return std::nullopt;
    }
  }
  Covector g = tilt + (x - p) / lambda;
  return ProximalPair{std::move(p), std::move(g), fp};
}

inline std::optional<ProximalPair> proximal_subgradient(const FunctionOracle& f,
                                                        const Point& x,
                                                        double lambda,
                                                        const Covector& tilt,
                                                        const Grid& grid) {
  return proximal_subgradient(f, sample_function(f, grid), x, lambda, tilt,
                              RefineOptions::for_dimension(grid.dimension()));
}

struct SamplingOptions {
  Grid grid;
  std::vector<double> lambdas{0.1, 0.01};
  // Per-axis tilt count, spread uniformly over [-L, L] with L the empirical
  // Lipschitz bound. Ignored when `tilts` is non-empty.
  int tilt_count = 5;
  std::vector<Covector> tilts;
  std::optional<RefineOptions> refine;
};

/// Uniform tensor-product tilt set in [-bound, bound]^n.
inline std::vector<Covector> uniform_tilts(Eigen::Index n, int per_axis,
                                           double bound) {
  if (per_axis < 1) throw InvalidInput("tilt count must be >= 1");
  std::vector<double> axis;
  if (per_axis == 1) {
    axis.push_back(0.0);
  } else {
    for (int i = 0; i < per_axis; ++i) {
      axis.push_back(-bound + 2.0 * bound * i / (per_axis - 1));
    }
  }
  std::size_t total = 1;
  for (Eigen::Index a = 0; a < n; ++a) total *= axis.size();
  std::vector<Covector> out;
  out.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    Covector t(n);
    std::size_t c = code;
    for (Eigen::Index a = n - 1; a >= 0; --a) {
      t(a) = axis[c % axis.size()];
      c /= axis.size();
    }
    out.push_back(std::move(t));
  }
  return out;
}

/// Tensor-product tilt set built from an explicit per-axis value list.
inline std::vector<Covector> tilts_from_values(Eigen::Index n,
                                               const std::vector<double>& values) {
  if (values.empty()) throw InvalidInput("empty tilt value list");
  std::vector<Covector> out;
  std::size_t total = 1;
  for (Eigen::Index a = 0; a < n; ++a) total *= values.size();
  for (std::size_t code = 0; code < total; ++code) {
    Covector t(n);
    std::size_t c = code;
    for (Eigen::Index a = n - 1; a >= 0; --a) {
      t(a) = values[c % values.size()];
      c /= values.size();
    }
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<Covector> resolve_tilts(const SamplingOptions& opt,
                                           const SampledFunction& sampled) {
  if (!opt.tilts.empty()) return opt.tilts;
  return uniform_tilts(sampled.grid.dimension(), opt.tilt_count,
                       empirical_lipschitz(sampled));
}

namespace detail {

inline bool lex_less(const GraphSample& a, const GraphSample& b) {
  for (Eigen::Index i = 0; i < a.x.size(); ++i) {
    if (a.x(i) != b.x(i)) return a.x(i) < b.x(i);
  }
  for (Eigen::Index i = 0; i < a.xstar.size(); ++i) {
    if (a.xstar(i) != b.xstar(i)) return a.xstar(i) < b.xstar(i);
  }
  return false;
}

inline bool same_pair(const GraphSample& a, const GraphSample& b, double tol) {
  return (a.x - b.x).lpNorm<Eigen::Infinity>() <= tol &&
         (a.xstar - b.xstar).lpNorm<Eigen::Infinity>() <= tol;
}

}  // namespace detail

/// Sorts lexicographically by (x, x*) and drops pairs equal to their
/// predecessor within tol in both components.
inline void deduplicate(SubgradientGraph& graph, double tol = 1e-12) {
  auto& s = graph.samples;
  std::sort(s.begin(), s.end(), detail::lex_less);
  std::vector<GraphSample> kept;
  kept.reserve(s.size());
  for (auto& g : s) {
    if (!kept.empty() && detail::same_pair(kept.back(), g, tol)) continue;
    kept.push_back(std::move(g));
  }
  s = std::move(kept);
}

/// Sweeps grid nodes x lambdas x tilts through the proximal step.
inline SubgradientGraph sample_graph(const FunctionOracle& f,
                                     const SamplingOptions& opt) {
  if (opt.lambdas.empty()) throw InvalidInput("sample_graph: empty lambda schedule");
  for (double l : opt.lambdas) {
    if (!(l > 0.0)) throw InvalidInput("sample_graph: lambdas must be > 0");
  }
  const SampledFunction sampled = sample_function(f, opt.grid);
  const auto tilts = resolve_tilts(opt, sampled);
  const RefineOptions refine =
      opt.refine.value_or(RefineOptions::for_dimension(opt.grid.dimension()));

  SubgradientGraph graph;
  for (const Point& x : sampled.nodes) {
    for (double lambda : opt.lambdas) {
      for (const Covector& t : tilts) {
        auto pair = proximal_subgradient(f, sampled, x, lambda, t, refine);
        if (pair && std::isfinite(pair->value) && pair->subgradient.allFinite()) {
          graph.samples.push_back(
              {std::move(pair->point), std::move(pair->subgradient), pair->value});
        }
      }
    }
  }
  if (graph.empty()) {
    throw EmptyGraph("sample_graph: no proximal pairs for '" + f.name + "'");
  }
  deduplicate(graph);
  return graph;
}

struct StabilityReport {
  double max_mismatch = 0.0;
  double tol = kSampledTol;
  std::size_t base_size = 0;
  std::size_t shifted_size = 0;

  bool stable() const { return max_mismatch <= tol; }
};

namespace detail {

// max over a in A of min over b in B of the sup-distance between (a.x, a.x* + shift)
// and (b.x, b.x*)
inline double directed_mismatch(const SubgradientGraph& A, const SubgradientGraph& B,
                                const Covector& shift) {
  double worst = 0.0;
  for (const auto& a : A.samples) {
    double best = kInf;
    for (const auto& b : B.samples) {
      const double d = std::max((a.x - b.x).lpNorm<Eigen::Infinity>(),
                                (a.xstar + shift - b.xstar).lpNorm<Eigen::Infinity>());
      best = std::min(best, d);
      if (best == 0.0) break;
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace detail

/// Checks d(f + <v,.>) = df + v on sampled graphs. The shifted function is
/// probed with the tilt set of f shifted by v, so both graphs target the
/// same proximal problems.
inline StabilityReport check_stability(const FunctionOracle& f, const Covector& v,
                                       const SamplingOptions& opt,
                                       double tol = kSampledTol) {
  require_dimension(v, opt.grid.dimension(), "check_stability shift");
  const SampledFunction sampled = sample_function(f, opt.grid);
  SamplingOptions base = opt;
  base.tilts = resolve_tilts(opt, sampled);

  FunctionOracle shifted = f;
  shifted.name = f.name + "+<v,.>";
  shifted.eval = [g = f.eval, v](const Point& x) { return g(x) + v.dot(x); };
  shifted.analytic_subgrad = nullptr;
  SamplingOptions moved = base;
  for (auto& t : moved.tilts) t += v;

  const SubgradientGraph g1 = sample_graph(f, base);
  const SubgradientGraph g2 = sample_graph(shifted, moved);
  StabilityReport r;
  r.tol = tol;
  r.base_size = g1.size();
  r.shifted_size = g2.size();
  r.max_mismatch = std::max(detail::directed_mismatch(g1, g2, v),
                            detail::directed_mismatch(g2, g1, -v));
  return r;
}

}  // namespace gauge_certify
