#pragma once

#include "gauge_certify/barrier.hpp"
#include "gauge_certify/subdiff.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace gauge_certify {

/// Finite search set with cached function values (+inf allowed).
struct SearchGrid {
  std::vector<Point> points;
  std::vector<double> values;
  double spacing = 0.0;

  std::size_t size() const { return points.size(); }
};

inline SearchGrid make_search_grid(const FunctionOracle& f, const Grid& grid) {
  SearchGrid s;
  s.points = grid.points();
  s.values.reserve(s.points.size());
  for (const auto& p : s.points) s.values.push_back(f(p));
  s.spacing = grid.max_spacing();
  return s;
}

/// Grid over the bounding box of U, restricted to nodes inside U.
inline SearchGrid make_search_grid(const FunctionOracle& f, const ConvexBody& U,
                                   int resolution) {
  const Grid grid = Grid::uniform(bounding_box(U), resolution);
  SearchGrid s;
  s.spacing = grid.max_spacing();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Point p = grid.point(i);
    if (!contains(U, p)) continue;
    s.values.push_back(f(p));
    s.points.push_back(std::move(p));
  }
  return s;
}

struct EkelandResult {
  Point y;
  double fy = 0.0;
  double eps = 0.0;
  double lambda = 0.0;
  Point start;
  double fstart = 0.0;
  int moves = 0;
};

/**
 * Ekeland's principle on a finite grid.
 *
 * From an eps-minimizer `start`, repeatedly moves to the grid point of least
 * value among those with f(z) + (eps/lambda)|z - cur| < f(cur). On exit
 *   f(y) <= f(start),  |y - start| <= lambda,
 *   f(y) <= f(z) + (eps/lambda)|z - y|  for every grid point z.
 */
inline EkelandResult ekeland(const FunctionOracle& f, const SearchGrid& grid,
                             const Point& start, double eps, double lambda) {
  if (!(eps > 0.0)) throw InvalidInput("ekeland: eps must be > 0");
  if (!(lambda > 0.0)) throw InvalidInput("ekeland: lambda must be > 0");
  double inf = kInf;
  for (double v : grid.values) inf = std::min(inf, v);
  if (!std::isfinite(inf)) throw InvalidInput("ekeland: f is +inf on the whole grid");

  const double fstart = f(start);
  if (!(fstart <= inf + eps)) {
    const double slack = fstart - (inf + eps);
    throw PreconditionError("ekeland: start is not an eps-minimizer (excess " +
                                std::to_string(slack) + ")",
                            slack);
  }

  const double rate = eps / lambda;
  EkelandResult r{start, fstart, eps, lambda, start, fstart, 0};
  for (std::size_t guard = 0; guard <= grid.size(); ++guard) {
    std::size_t best = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = grid.values[i];
      if (!std::isfinite(v)) continue;
      if (v + rate * (grid.points[i] - r.y).norm() < r.fy) {
        if (best == grid.size() || v < grid.values[best]) best = i;
      }
    }
    if (best == grid.size()) return r;
    r.y = grid.points[best];
    r.fy = grid.values[best];
    ++r.moves;
  }
  throw InternalError("ekeland: descent did not terminate");
}

struct EkelandCheck {
  bool descent = false;
  bool localized = false;
  bool perturbed_minimum = false;

  bool all() const { return descent && localized && perturbed_minimum; }
};

/// Re-checks the three Ekeland guarantees by exhaustive comparison.
inline EkelandCheck verify_ekeland(const EkelandResult& r, const SearchGrid& grid) {
  EkelandCheck c;
  c.descent = r.fy <= r.fstart;
  c.localized = (r.y - r.start).norm() <= r.lambda;
  const double rate = r.eps / r.lambda;
  c.perturbed_minimum = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(r.fy <= grid.values[i] + rate * (grid.points[i] - r.y).norm())) {
      c.perturbed_minimum = false;
      break;
    }
  }
  return c;
}

struct TraceOptions {
  int n_max = 12;
  // empty: eps_n = 2^-n
  std::vector<double> eps_schedule;
  int resolution = 101;
  bool refine = true;
  std::size_t max_grid_points = 1'000'000;
  // Ekeland radius; the perturbation slope is eps_n / ekeland_lambda.
  double ekeland_lambda = 1.0;
  int prox_retries = 6;
};

struct TraceStep {
  int n = 0;
  double eps = 0.0;
  Point x;
  Covector xstar;
  Point y;
  Covector ystar;
  double gap_xy = 0.0;
  double value = 0.0;         // f(x_n) + g(y_n)
  double inf_estimate = 0.0;  // grid infimum of f + g at this step
  double pairing = 0.0;       // <x*, x - anchor> + <y*, y - anchor>
  double value_bound = 0.0;   // 2 eps
  double pairing_bound = 0.0; // (M + 1) eps
  double slack = 0.0;         // max(0, |pairing| - pairing_bound)
  double prox_lambda = 0.0;
  double spacing = 0.0;
  std::size_t grid_points = 0;
};

struct TraceRecord {
  std::vector<TraceStep> iterations;
  double inf_estimate = kInf;
  Point anchor;
  double M = 0.0;
  bool converged = false;
  std::vector<std::string> warnings;

  double max_slack() const {
    double s = 0.0;
    for (const auto& it : iterations) s = std::max(s, it.slack);
    return s;
  }
};

/// sup { |y - anchor| : y in center + U }, exact for tubes and balls.
inline double domain_radius(const ConvexBody& body, const Point& center,
                            const Point& anchor) {
  const Point offset = center - anchor;
  if (const auto* t = std::get_if<SegmentTube>(&body.shape())) {
    return std::max((offset + t->from).norm(), (offset + t->to).norm()) + t->delta;
  }
  return offset.norm() + radius_bounds(body).outer;
}

inline std::vector<double> default_eps_schedule(int n_max) {
  std::vector<double> eps;
  for (int n = 1; n <= n_max; ++n) eps.push_back(std::ldexp(1.0, -n));
  return eps;
}

/**
 * Instrumented construction of sequences (x_n, x_n*) and (y_n, y_n*) for
 * f + g on the domain center + U.
 *
 * Step n picks an eps_n-minimizer of f + g on the grid, runs the grid
 * Ekeland descent with slope eps_n to get y_n, takes y_n* in the convex
 * subdifferential of g at y_n, and obtains (x_n, x_n*) as a tilted proximal
 * pair of f at y_n with tilt -y_n* and parameter eps_n (shrunk until x_n is
 * eps_n-close to y_n in both argument and value).
 */
inline TraceRecord lemma_trace(const FunctionOracle& f, const BarrierTerm& g,
                               const Point& anchor, const TraceOptions& opt = {}) {
  const Eigen::Index dim = g.dimension();
  require_dimension(anchor, dim, "lemma_trace anchor");
  if (opt.n_max < 1) throw InvalidInput("lemma_trace: n_max must be >= 1");
  std::vector<double> eps = opt.eps_schedule.empty()
                                ? default_eps_schedule(opt.n_max)
                                : opt.eps_schedule;
  if (static_cast<int>(eps.size()) < opt.n_max) {
    throw InvalidInput("lemma_trace: eps schedule shorter than n_max");
  }
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || (i > 0 && eps[i] > eps[i - 1])) {
      throw InvalidInput("lemma_trace: eps schedule must be positive and nonincreasing");
    }
  }

  const ConvexBody& body = g.barrier.body();
  const Box local = bounding_box(body);
  const Box box(local.lower + g.center, local.upper + g.center);

  TraceRecord rec;
  rec.anchor = anchor;
  rec.M = domain_radius(body, g.center, anchor);

  Grid grid = Grid::uniform(box, opt.resolution);
  FunctionOracle total = f;
  total.name = f.name + "+g";
  total.eval = [&f, &g](const Point& x) {
    const double gx = g(x);
    if (!std::isfinite(gx)) return kInf;
    const double fx = f(x);
    return std::isfinite(fx) ? fx + gx : kInf;
  };

  for (int n = 1; n <= opt.n_max; ++n) {
    const double en = eps[static_cast<std::size_t>(n - 1)];
    if (n > 1 && opt.refine) {
      Grid finer = grid.doubled();
      if (finer.size() <= opt.max_grid_points) grid = std::move(finer);
    }

    const SampledFunction fs = sample_function(f, grid);
    SearchGrid sg;
    sg.spacing = grid.max_spacing();
    for (std::size_t i = 0; i < fs.nodes.size(); ++i) {
      const double gx = g(fs.nodes[i]);
      if (!std::isfinite(gx)) continue;
      sg.points.push_back(fs.nodes[i]);
      sg.values.push_back(std::isfinite(fs.values[i]) ? fs.values[i] + gx : kInf);
    }
    double inf = kInf;
    for (double v : sg.values) inf = std::min(inf, v);
    if (!std::isfinite(inf)) {
      throw InvalidInput("lemma_trace: dom f does not meet the barrier domain on the grid");
    }
    rec.inf_estimate = inf;

    std::size_t z = 0;
    while (!(sg.values[z] < inf + en)) ++z;
    const EkelandResult ek = ekeland(total, sg, sg.points[z], en, opt.ekeland_lambda);

    TraceStep st;
    st.n = n;
    st.eps = en;
    st.y = ek.y;
    st.ystar = g.subgradient(st.y);
    st.spacing = grid.max_spacing();
    st.grid_points = sg.size();
    st.inf_estimate = inf;
    const double fy = f(st.y);

    const RefineOptions refine = RefineOptions::for_dimension(dim);
    const Covector tilt = -st.ystar;
    double lam = en;
    bool found = false;
    for (int attempt = 0; attempt <= opt.prox_retries; ++attempt, lam /= 10.0) {
      auto pair = proximal_subgradient(f, fs, st.y, lam, tilt, refine);
      if (!pair) continue;
      const bool close = (pair->point - st.y).norm() < en &&
                         std::abs(pair->value - fy) < en && g.in_domain(pair->point);
      st.x = pair->point;
      st.xstar = pair->subgradient;
      st.prox_lambda = lam;
      found = true;
      if (close) break;
    }
    if (!found) {
      rec.warnings.push_back("step " + std::to_string(n) +
                             ": no proximal pair near y_n; recorded x_n = y_n");
      st.x = st.y;
      st.xstar = tilt;
      st.prox_lambda = lam;
    }

    st.gap_xy = (st.x - st.y).norm();
    st.value = f(st.x) + g(st.y);
    st.pairing = st.xstar.dot(st.x - anchor) + st.ystar.dot(st.y - anchor);
    st.value_bound = 2.0 * en;
    st.pairing_bound = (rec.M + 1.0) * en;
    st.slack = std::max(0.0, std::abs(st.pairing) - st.pairing_bound);

    if (!(std::abs(st.value - inf) <= st.value_bound)) {
      rec.warnings.push_back("step " + std::to_string(n) +
                             ": |value - inf| exceeds 2 eps_n");
    }
    if (st.slack > 0.0) {
      rec.warnings.push_back("step " + std::to_string(n) + ": pairing exceeds (M+1) eps_n by " +
                             std::to_string(st.slack));
    }
    rec.iterations.push_back(std::move(st));
  }

  const TraceStep& last = rec.iterations.back();
  rec.converged = last.gap_xy <= last.eps + last.spacing &&
                  std::abs(last.value - last.inf_estimate) <= last.value_bound &&
                  std::abs(last.pairing) <= last.pairing_bound + last.spacing;
  if (!rec.converged) {
    rec.warnings.push_back("diagnostics not below tolerance at n_max");
  }
  return rec;
}

}  // namespace gauge_certify
