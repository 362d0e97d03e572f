#pragma once

#include "gauge_certify/subdiff.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gauge_certify {

enum class MonotoneVerdict { Monotone, Violated };

struct MonotonicityReport {
  MonotoneVerdict verdict = MonotoneVerdict::Monotone;
  std::optional<std::pair<GraphSample, GraphSample>> worst_pair;
  // min over unordered pairs of <x2* - x1*, x2 - x1>; +inf with fewer than two samples
  double worst_value = kInf;

  bool monotone() const { return verdict == MonotoneVerdict::Monotone; }
};

/// Exact O(m^2) sweep over all unordered pairs of the graph.
inline MonotonicityReport monotonicity_check(const SubgradientGraph& graph, double tol) {
  if (graph.empty()) throw EmptyGraph("monotonicity_check: empty graph");
  MonotonicityReport r;
  std::size_t bi = 0;
  std::size_t bj = 0;
  const auto& s = graph.samples;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      const double v = (s[j].xstar - s[i].xstar).dot(s[j].x - s[i].x);
      if (v < r.worst_value) {
        r.worst_value = v;
        bi = i;
        bj = j;
      }
    }
  }
  if (s.size() >= 2) r.worst_pair = std::make_pair(s[bi], s[bj]);
  r.verdict = r.worst_value >= -tol ? MonotoneVerdict::Monotone : MonotoneVerdict::Violated;
  return r;
}

struct MintyResult {
  bool related = true;
  double worst_value = kInf;  // min over the graph of <x* - x0*, x - x0>
  std::optional<GraphSample> witness;
  std::optional<std::string> warning;
};

/// Monotone-relation test of (x0, x0*) against every sampled pair.
inline MintyResult minty_test(const SubgradientGraph& graph, const Point& x0,
                              const Covector& x0star, double tol) {
  MintyResult r;
  if (graph.empty()) {
    r.warning = "empty graph: relation holds vacuously";
    return r;
  }
  require_dimension(x0, graph.dimension(), "minty_test x0");
  require_dimension(x0star, graph.dimension(), "minty_test x0*");
  std::size_t worst = 0;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const auto& g = graph.samples[i];
    const double v = (g.xstar - x0star).dot(g.x - x0);
    if (v < r.worst_value) {
      r.worst_value = v;
      worst = i;
    }
  }
  r.related = r.worst_value >= -tol;
  if (!r.related) r.witness = graph.samples[worst];
  return r;
}

/// max over the graph of f(x) + <x*, xbar - x>.
inline double envelope(const SubgradientGraph& graph, const Point& xbar) {
  if (graph.empty()) throw EmptyGraph("envelope: empty graph");
  require_dimension(xbar, graph.dimension(), "envelope point");
  double m = -kInf;
  for (const auto& g : graph.samples) m = std::max(m, g.fx + g.xstar.dot(xbar - g.x));
  return m;
}

enum class Verdict { CertifiedConvex, NonconvexWitnessed, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::CertifiedConvex: return "certified-convex";
    case Verdict::NonconvexWitnessed: return "nonconvex-witnessed";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct CertifyOptions {
  SamplingOptions sampling;
  std::vector<Point> test_points;  // empty: the sampling grid nodes
  double monotone_tol = kSampledTol;
  // Envelope tolerance; unset means gap_factor * spacing * L, L the empirical
  // Lipschitz bound of f on the grid.
  std::optional<double> gap_tol;
  double gap_factor = 100.0;
  std::size_t max_graph = 5000;
};

struct CertificationReport {
  Verdict verdict = Verdict::Inconclusive;
  std::size_t graph_size = 0;
  std::size_t sampled_size = 0;  // before thinning to max_graph
  std::optional<MonotonicityReport> monotonicity;
  double envelope_gap = -kInf;     // sup over test points of f - envelope
  std::optional<Point> gap_witness;
  double envelope_excess = -kInf;  // sup over test points of envelope - f
  std::optional<Point> excess_witness;
  double gap_tol = 0.0;
  double lipschitz_estimate = 0.0;
  double spacing = 0.0;
  std::size_t tested_points = 0;
  std::size_t skipped_points = 0;  // test points outside dom f
  std::vector<std::string> diagnostics;
};

/// Keeps an evenly strided subset of at most `cap` samples.
inline SubgradientGraph thin_graph(const SubgradientGraph& g, std::size_t cap) {
  if (g.size() <= cap || cap == 0) return g;
  SubgradientGraph out;
  out.samples.reserve(cap);
  for (std::size_t k = 0; k < cap; ++k) {
    out.samples.push_back(g.samples[k * g.size() / cap]);
  }
  return out;
}

/**
 * Monotone => convex certification on a sampled proximal graph.
 *
 * A monotonicity violation short-circuits to nonconvex-witnessed with the
 * worst pair. Otherwise the envelope g = max of sampled affine minorants is
 * compared with f on the test points: an affine piece rising above f by more
 * than the tolerance also witnesses nonconvexity, a gap f - g within the
 * tolerance certifies convexity, and anything else is inconclusive.
 */
inline CertificationReport certify_convexity(const FunctionOracle& f,
                                             const CertifyOptions& opt) {
  CertificationReport rep;
  const SampledFunction sampled = sample_function(f, opt.sampling.grid);
  rep.lipschitz_estimate = empirical_lipschitz(sampled);
  rep.spacing = opt.sampling.grid.max_spacing();
  rep.gap_tol = opt.gap_tol.value_or(
      std::max(opt.gap_factor * rep.spacing * rep.lipschitz_estimate, opt.monotone_tol));

  SubgradientGraph graph;
  try {
    graph = sample_graph(f, opt.sampling);
  } catch (const EmptyGraph& e) {
    rep.diagnostics.emplace_back(e.what());
    return rep;
  }
  rep.sampled_size = graph.size();
  if (graph.size() > opt.max_graph) {
    graph = thin_graph(graph, opt.max_graph);
    rep.diagnostics.push_back("graph thinned from " + std::to_string(rep.sampled_size) +
                              " to " + std::to_string(graph.size()) + " samples");
  }
  rep.graph_size = graph.size();

  rep.monotonicity = monotonicity_check(graph, opt.monotone_tol);
  if (!rep.monotonicity->monotone()) {
    rep.verdict = Verdict::NonconvexWitnessed;
    return rep;
  }

  const std::vector<Point>& tests =
      opt.test_points.empty() ? sampled.nodes : opt.test_points;
  for (const Point& xbar : tests) {
    const double fx = f(xbar);
    if (!std::isfinite(fx)) {
      ++rep.skipped_points;
      continue;
    }
    ++rep.tested_points;
    const double env = envelope(graph, xbar);
    if (fx - env > rep.envelope_gap) {
      rep.envelope_gap = fx - env;
      rep.gap_witness = xbar;
    }
    if (env - fx > rep.envelope_excess) {
      rep.envelope_excess = env - fx;
      rep.excess_witness = xbar;
    }
  }
  if (rep.tested_points == 0) {
    rep.diagnostics.emplace_back("no test point inside dom f");
    return rep;
  }
  if (rep.envelope_excess > rep.gap_tol) {
    rep.verdict = Verdict::NonconvexWitnessed;
    rep.diagnostics.emplace_back("a sampled affine minorant exceeds f at the excess witness");
  } else if (rep.envelope_gap <= rep.gap_tol) {
    rep.verdict = Verdict::CertifiedConvex;
  } else {
    rep.diagnostics.emplace_back(
        "monotone graph but envelope gap above tolerance; graph may be under-sampled");
  }
  return rep;
}

}  // namespace gauge_certify
