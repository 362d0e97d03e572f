#pragma once

#include "gauge_certify/bodies.hpp"

namespace gauge_certify {

// Below this distance to the boundary the barrier is reported as +inf.
inline constexpr double kBoundaryGuard = 1e-14;

/// The scaled barrier a * mu/(1 - mu) of a convex body, extended by +inf
/// outside the body.
class Barrier {
 public:
  explicit Barrier(ConvexBody body, double scale = 1.0)
      : body_(std::move(body)), scale_(scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw InvalidInput("barrier: scale must be positive and finite");
    }
  }

  const ConvexBody& body() const { return body_; }
  double scale() const { return scale_; }

 private:
  ConvexBody body_;
  double scale_;
};

inline double barrier_eval(const Barrier& bar, const Point& x) {
  const double mu = gauge(bar.body(), x).value;
  const double room = 1.0 - mu;
  if (room < kBoundaryGuard) return kInf;
  return bar.scale() * mu / room;
}

/// Chain rule through t -> t/(1-t): a (1-mu)^-2 times a gauge subgradient.
inline Covector barrier_subgradient(const Barrier& bar, const Point& x) {
  const double mu = gauge(bar.body(), x).value;
  const double room = 1.0 - mu;
  if (room < kBoundaryGuard) {
    throw OutOfDomain("barrier_subgradient: point outside the body (mu = " +
                      std::to_string(mu) + ")");
  }
  return (bar.scale() / (room * room)) * gauge_subgradient(bar.body(), x);
}

/// Lipschitz constant of a*k on the level set {a*k <= level}.
///
/// On that set mu <= t/(1+t) with t = level/a, the outer function has slope
/// at most a(1+t)^2 there, and mu is c-Lipschitz with c = 1/inner radius.
inline double level_lipschitz(const Barrier& bar, double level) {
  if (!(level > 0.0)) throw InvalidInput("level_lipschitz: level must be > 0");
  const double c = radius_bounds(bar.body()).upper_constant();
  const double t = level / bar.scale();
  return bar.scale() * c * (1.0 + t) * (1.0 + t);
}

/**
 * g(x) = a k(x - center) - <linear, x - center>.
 *
 * This is the convex continuous barrier on center + U used by the sequence
 * construction; `linear` is zero for the plain barrier and equals x0* for
 * the monotone-relation test.
 */
struct BarrierTerm {
  Barrier barrier;
  Point center;
  Covector linear;

  BarrierTerm(Barrier bar, Point c)
      : barrier(std::move(bar)), center(std::move(c)),
        linear(Covector::Zero(center.size())) {
    require_dimension(center, barrier.body().dimension(), "barrier center");
  }
  BarrierTerm(Barrier bar, Point c, Covector lin)
      : barrier(std::move(bar)), center(std::move(c)), linear(std::move(lin)) {
    require_dimension(center, barrier.body().dimension(), "barrier center");
    require_dimension(linear, barrier.body().dimension(), "barrier linear part");
  }

  Eigen::Index dimension() const { return center.size(); }

  double operator()(const Point& x) const {
    const Point shifted = x - center;
    const double k = barrier_eval(barrier, shifted);
    if (!std::isfinite(k)) return kInf;
    return k - linear.dot(shifted);
  }

  Covector subgradient(const Point& x) const {
    return barrier_subgradient(barrier, x - center) - linear;
  }

  bool in_domain(const Point& x) const {
    return std::isfinite(barrier_eval(barrier, x - center));
  }
};

}  // namespace gauge_certify
