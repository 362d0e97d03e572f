#pragma once

#include "gauge_certify/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gauge_certify {

enum class NormOrder { One, Two, Infinity };

/// U = { x : <a_i, x> < 1 for all i }.
struct HalfspacePolytope {
  std::vector<Covector> normals;
};

/// U = { x : ||x||_p < radius }.
struct NormBall {
  Eigen::Index dimension;
  double radius;
  NormOrder order;
};

/// U = [from, to] + delta * (open Euclidean unit ball). The segment is stored
/// already translated so that the anchor sits at the origin.
struct SegmentTube {
  Point from;
  Point to;
  double delta;
};

inline constexpr double kGaugeTol = 1e-10;
inline constexpr double kSupportSlack = 1.01;

/**
 * Bounded open convex neighbourhood of the origin.
 *
 * Instances are only produced by the named constructors, each of which
 * checks that 0 is interior and the set is bounded.
 */
class ConvexBody {
 public:
  using Variant = std::variant<HalfspacePolytope, NormBall, SegmentTube>;

  static ConvexBody polytope(std::vector<Covector> normals);
  static ConvexBody ball(Eigen::Index dimension, double radius,
                         NormOrder order = NormOrder::Two);
  // The segment tube [p, q] + delta*B translated by -anchor.
  static ConvexBody tube(const Point& p, const Point& q, double delta,
                         const Point& anchor);

  const Variant& shape() const { return shape_; }
  Eigen::Index dimension() const { return dimension_; }

 private:
  ConvexBody(Variant shape, Eigen::Index dim)
      : shape_(std::move(shape)), dimension_(dim) {}

  Variant shape_;
  Eigen::Index dimension_;
};

struct GaugeValue {
  double value = 0.0;
  // 1 - value inside U, 0 on or outside the boundary.
  double boundary_proximity = 1.0;

  bool inside() const { return value < 1.0; }
};

struct RadiusBounds {
  double inner;  // delta: delta*B is contained in U
  double outer;  // s: U is contained in s*B

  // mu(x) <= c ||x||
  double upper_constant() const { return 1.0 / inner; }
  // mu(x) >= b ||x||
  double lower_constant() const { return 1.0 / outer; }
};

namespace detail {

inline double segment_distance(const Point& x, const Point& a, const Point& b) {
  const Point d = b - a;
  const double len2 = d.squaredNorm();
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp((x - a).dot(d) / len2, 0.0, 1.0);
  return (x - (a + t * d)).norm();
}

inline Point segment_projection(const Point& x, const Point& a, const Point& b) {
  const Point d = b - a;
  const double len2 = d.squaredNorm();
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp((x - a).dot(d) / len2, 0.0, 1.0);
  return a + t * d;
}

inline double norm_p(const Point& x, NormOrder order) {
  switch (order) {
    case NormOrder::One: return x.lpNorm<1>();
    case NormOrder::Two: return x.norm();
    case NormOrder::Infinity: return x.lpNorm<Eigen::Infinity>();
  }
  return x.norm();
}

inline double polytope_support(const HalfspacePolytope& P, const Point& x) {
  double m = 0.0;
  for (const auto& a : P.normals) m = std::max(m, a.dot(x));
  return m;
}

// Quasi-uniform unit directions on S^{n-1}; n >= 3 uses a Fibonacci sphere
// for n == 3 and axis/diagonal stencils otherwise.
inline std::vector<Point> sample_directions(Eigen::Index n, int count) {
  std::vector<Point> dirs;
  if (n == 1) {
    dirs.push_back(scalar_point(1.0));
    dirs.push_back(scalar_point(-1.0));
  } else if (n == 2) {
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * std::numbers::pi * i / count;
      dirs.push_back(make_point({std::cos(t), std::sin(t)}));
    }
  } else if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      const double r = std::sqrt(1.0 - z * z);
      const double phi = golden * i;
      dirs.push_back(make_point({r * std::cos(phi), r * std::sin(phi), z}));
    }
  } else {
    // sign patterns of {-1,0,1}^n without the zero vector, normalized
    const auto total = static_cast<long>(std::pow(3.0, static_cast<double>(n)));
    for (long code = 0; code < total; ++code) {
      Point d(n);
      long c = code;
      for (Eigen::Index a = 0; a < n; ++a) {
        d(a) = static_cast<double>(c % 3) - 1.0;
        c /= 3;
      }
      if (d.squaredNorm() > 0.0) dirs.push_back(d.normalized());
    }
  }
  return dirs;
}

// Largest Euclidean norm over the polytope, exact in R^1 and R^2, otherwise
// sampled along directions and inflated by kSupportSlack. Returns +inf when
// the polytope is unbounded.
inline double polytope_outer_radius(const HalfspacePolytope& P, Eigen::Index n) {
  if (n == 1) {
    double upper = kInf;
    double lower = -kInf;
    for (const auto& a : P.normals) {
      if (a(0) > 0.0) upper = std::min(upper, 1.0 / a(0));
      if (a(0) < 0.0) lower = std::max(lower, 1.0 / a(0));
    }
    return std::max(upper, -lower);
  }
  if (n == 2) {
    // bounded iff consecutive normal angles never leave a gap of pi or more
    std::vector<double> angles;
    for (const auto& a : P.normals) {
      if (a.squaredNorm() > 0.0) angles.push_back(std::atan2(a(1), a(0)));
    }
    if (angles.size() < 3) return kInf;
    std::sort(angles.begin(), angles.end());
    double gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
    for (std::size_t i = 1; i < angles.size(); ++i) {
      gap = std::max(gap, angles[i] - angles[i - 1]);
    }
    if (gap >= std::numbers::pi - 1e-12) return kInf;

    double s = 0.0;
    for (std::size_t i = 0; i < P.normals.size(); ++i) {
      for (std::size_t j = i + 1; j < P.normals.size(); ++j) {
        Eigen::Matrix2d A;
        A.row(0) = P.normals[i].transpose();
        A.row(1) = P.normals[j].transpose();
        if (std::abs(A.determinant()) < 1e-14) continue;
        const Eigen::Vector2d v = A.partialPivLu().solve(Eigen::Vector2d::Ones());
        if (polytope_support(P, v) <= 1.0 + 1e-12) s = std::max(s, v.norm());
      }
    }
    return s;
  }
  double s = 0.0;
  for (const auto& d : sample_directions(n, 4096)) {
    const double mu = polytope_support(P, d);
    if (mu <= 1e-12) return kInf;
    s = std::max(s, 1.0 / mu);
  }
  return kSupportSlack * s;
}

}  // namespace detail

inline ConvexBody ConvexBody::polytope(std::vector<Covector> normals) {
  if (normals.empty()) throw InvalidInput("polytope: no normals given");
  const Eigen::Index n = normals.front().size();
  if (n == 0) throw InvalidInput("polytope: zero-dimensional normal");
  for (const auto& a : normals) {
    require_dimension(a, n, "polytope normal");
    require_finite(a, "polytope normal");
  }
  HalfspacePolytope P{std::move(normals)};
  if (!std::isfinite(detail::polytope_outer_radius(P, n))) {
    throw InvalidInput("polytope: normals do not bound the set");
  }
  return ConvexBody(std::move(P), n);
}

inline ConvexBody ConvexBody::ball(Eigen::Index dimension, double radius,
                                   NormOrder order) {
  if (dimension < 1) throw InvalidInput("ball: dimension must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidInput("ball: radius must be positive and finite");
  }
  return ConvexBody(NormBall{dimension, radius, order}, dimension);
}

inline ConvexBody ConvexBody::tube(const Point& p, const Point& q, double delta,
                                   const Point& anchor) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw InvalidInput("tube: delta must be positive and finite");
  }
  const Eigen::Index n = p.size();
  if (n == 0) throw InvalidInput("tube: empty endpoint");
  require_dimension(q, n, "tube endpoint q");
  require_dimension(anchor, n, "tube anchor");
  require_finite(p, "tube endpoint p");
  require_finite(q, "tube endpoint q");
  require_finite(anchor, "tube anchor");
  Point from = p - anchor;
  Point to = q - anchor;
  if (detail::segment_distance(Point::Zero(n), from, to) >= delta) {
    throw InvalidInput("tube: anchor is not interior to the tube");
  }
  return ConvexBody(SegmentTube{std::move(from), std::move(to), delta}, n);
}

/// The tube body C - {p} with C = [p, q] + delta*B, anchored at p.
inline ConvexBody tube_body(const Point& p, const Point& q, double delta) {
  return ConvexBody::tube(p, q, delta, p);
}

/// Direct membership test, independent of the gauge evaluation.
inline bool contains(const ConvexBody& body, const Point& x) {
  require_dimension(x, body.dimension(), "contains");
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HalfspacePolytope>) {
          for (const auto& a : s.normals) {
            if (!(a.dot(x) < 1.0)) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, NormBall>) {
          return detail::norm_p(x, s.order) < s.radius;
        } else {
          return detail::segment_distance(x, s.from, s.to) < s.delta;
        }
      },
      body.shape());
}

/// Euclidean inner and outer radii of U.
inline RadiusBounds radius_bounds(const ConvexBody& body) {
  const Eigen::Index n = body.dimension();
  const double rootn = std::sqrt(static_cast<double>(n));
  return std::visit(
      [&](const auto& s) -> RadiusBounds {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HalfspacePolytope>) {
          double amax = 0.0;
          for (const auto& a : s.normals) amax = std::max(amax, a.norm());
          const double outer = detail::polytope_outer_radius(s, n);
          if (!std::isfinite(outer)) throw InternalError("unbounded polytope");
          return {1.0 / amax, outer};
        } else if constexpr (std::is_same_v<T, NormBall>) {
          switch (s.order) {
            case NormOrder::One: return {s.radius / rootn, s.radius};
            case NormOrder::Two: return {s.radius, s.radius};
            case NormOrder::Infinity: return {s.radius, s.radius * rootn};
          }
          return {s.radius, s.radius};
        } else {
          // Distance from the origin to the segment sets both radii exactly.
          const double d0 = detail::segment_distance(Point::Zero(n), s.from, s.to);
          return {s.delta - d0, std::max(s.from.norm(), s.to.norm()) + s.delta};
        }
      },
      body.shape());
}

/// Axis-aligned box containing the closure of U.
inline Box bounding_box(const ConvexBody& body) {
  const Eigen::Index n = body.dimension();
  return std::visit(
      [&](const auto& s) -> Box {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SegmentTube>) {
          return Box(s.from.cwiseMin(s.to).array() - s.delta,
                     s.from.cwiseMax(s.to).array() + s.delta);
        } else if constexpr (std::is_same_v<T, NormBall>) {
          return Box::cube(n, -s.radius, s.radius);
        } else {
          const double r = radius_bounds(body).outer;
          return Box::cube(n, -r, r);
        }
      },
      body.shape());
}

/**
 * Minkowski functional mu(x) = inf { t > 0 : x in tU }.
 *
 * Polytopes and norm balls are evaluated in closed form. Segment tubes are
 * evaluated by bisection on t, bracketed by the radius bounds, to a relative
 * width of tol.
 */
inline GaugeValue gauge(const ConvexBody& body, const Point& x,
                        double tol = kGaugeTol) {
  require_dimension(x, body.dimension(), "gauge");
  require_finite(x, "gauge");
  const double value = std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HalfspacePolytope>) {
          return detail::polytope_support(s, x);
        } else if constexpr (std::is_same_v<T, NormBall>) {
          return detail::norm_p(x, s.order) / s.radius;
        } else {
          const double r = x.norm();
          if (r == 0.0) return 0.0;
          const RadiusBounds rb = radius_bounds(body);
          // x/t in U  <=>  dist(x, t*seg) < t*delta, monotone in t
          double lo = 0.5 * r / rb.outer;
          double hi = 2.0 * r / rb.inner;
          while (hi - lo > tol * hi) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (detail::segment_distance(x / mid, s.from, s.to) < s.delta) {
              hi = mid;
            } else {
              lo = mid;
            }
          }
          return 0.5 * (lo + hi);
        }
      },
      body.shape());
  return {value, value < 1.0 ? 1.0 - value : 0.0};
}

/// An element g of the Fenchel subdifferential of mu at x. Returns the zero
/// covector at x = 0, which is valid for every body since mu >= 0.
inline Covector gauge_subgradient(const ConvexBody& body, const Point& x) {
  require_dimension(x, body.dimension(), "gauge_subgradient");
  require_finite(x, "gauge_subgradient");
  const Eigen::Index n = body.dimension();
  if (x.isZero(0.0)) return Covector::Zero(n);
  return std::visit(
      [&](const auto& s) -> Covector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HalfspacePolytope>) {
          // lowest-index active normal
          std::size_t best = 0;
          double m = s.normals[0].dot(x);
          for (std::size_t i = 1; i < s.normals.size(); ++i) {
            const double v = s.normals[i].dot(x);
            if (v > m) {
              m = v;
              best = i;
            }
          }
          return s.normals[best];
        } else if constexpr (std::is_same_v<T, NormBall>) {
          switch (s.order) {
            case NormOrder::Two: return x / (s.radius * x.norm());
            case NormOrder::One: {
              Covector g = x.unaryExpr([](double v) {
                return static_cast<double>((v > 0.0) - (v < 0.0));
              });
              return g / s.radius;
            }
            case NormOrder::Infinity: {
              Eigen::Index i = 0;
              x.cwiseAbs().maxCoeff(&i);
              Covector g = Covector::Zero(n);
              g(i) = (x(i) > 0.0 ? 1.0 : -1.0) / s.radius;
              return g;
            }
          }
          return Covector::Zero(n);
        } else {
          // Outward normal at the boundary point z = x / mu(x), scaled so
          // that <g, x> = mu(x).
          const double mu = gauge(body, x).value;
          const Point z = x / mu;
          const Covector normal = z - detail::segment_projection(z, s.from, s.to);
          const double support = normal.dot(z);
          if (!(support > 0.0)) throw InternalError("tube normal degenerate");
          return normal / support;
        }
      },
      body.shape());
}

inline std::string describe(const ConvexBody& body) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HalfspacePolytope>) {
          return "polytope(" + std::to_string(s.normals.size()) + " normals)";
        } else if constexpr (std::is_same_v<T, NormBall>) {
          const char* p = s.order == NormOrder::One   ? "1"
                          : s.order == NormOrder::Two ? "2"
                                                      : "inf";
          return "ball(r=" + std::to_string(s.radius) + ", p=" + p + ")";
        } else {
          return "tube(delta=" + std::to_string(s.delta) + ")";
        }
      },
      body.shape());
}

}  // namespace gauge_certify
