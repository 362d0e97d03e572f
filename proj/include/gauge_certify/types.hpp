#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gauge_certify {

// Points and covectors both live in R^n with the Euclidean pairing.
using Point = Eigen::VectorXd;
using Covector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OutOfDomain : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class EmptyGraph : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised when a caller-supplied point violates an algorithm's entry
// condition; slack is the measured amount of the violation.
class PreconditionError : public std::runtime_error {
 public:
  PreconditionError(const std::string& what, double slack)
      : std::runtime_error(what), slack_(slack) {}
  double slack() const noexcept { return slack_; }

 private:
  double slack_;
};

inline bool all_finite(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return v.allFinite();
}

inline void require_finite(const Eigen::Ref<const Eigen::VectorXd>& v,
                           std::string_view what) {
  if (!v.allFinite()) {
    throw InvalidInput(std::string(what) + ": non-finite coordinate");
  }
}

inline void require_dimension(const Eigen::Ref<const Eigen::VectorXd>& v,
                              Eigen::Index dim, std::string_view what) {
  if (v.size() != dim) {
    throw InvalidInput(std::string(what) + ": expected dimension " +
                       std::to_string(dim) + ", got " +
                       std::to_string(v.size()));
  }
}

inline Point make_point(std::initializer_list<double> coords) {
  Point p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) p(i++) = c;
  return p;
}

inline Point scalar_point(double v) { return make_point({v}); }

/// Axis-aligned box [lower, upper] in R^n.
struct Box {
  Point lower;
  Point upper;

  Box() = default;
  Box(Point lo, Point hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size() || lower.size() == 0) {
      throw InvalidInput("box: lower/upper dimension mismatch");
    }
    require_finite(lower, "box lower corner");
    require_finite(upper, "box upper corner");
    if ((upper.array() < lower.array()).any()) {
      throw InvalidInput("box: upper corner below lower corner");
    }
  }

  static Box cube(Eigen::Index dim, double lo, double hi) {
    return Box(Point::Constant(dim, lo), Point::Constant(dim, hi));
  }

  Eigen::Index dimension() const { return lower.size(); }

  bool contains(const Point& x) const {
    return (x.array() >= lower.array()).all() &&
           (x.array() <= upper.array()).all();
  }
};

/// Tensor-product grid of counts[i] equally spaced nodes on each axis of a
/// box, endpoints included. Node order is lexicographic with axis 0 slowest.
class Grid {
 public:
  Grid() = default;
  Grid(Box box, std::vector<int> counts)
      : box_(std::move(box)), counts_(std::move(counts)) {
    if (static_cast<Eigen::Index>(counts_.size()) != box_.dimension()) {
      throw InvalidInput("grid: one node count per axis required");
    }
    for (int c : counts_) {
      if (c < 2) throw InvalidInput("grid: resolution must be >= 2 per axis");
    }
  }

  static Grid uniform(Box box, int per_axis) {
    std::vector<int> counts(static_cast<std::size_t>(box.dimension()),
                            per_axis);
    return Grid(std::move(box), std::move(counts));
  }

  const Box& box() const { return box_; }
  const std::vector<int>& counts() const { return counts_; }
  Eigen::Index dimension() const { return box_.dimension(); }

  std::size_t size() const {
    std::size_t n = 1;
    for (int c : counts_) n *= static_cast<std::size_t>(c);
    return n;
  }

  double spacing(Eigen::Index axis) const {
    return (box_.upper(axis) - box_.lower(axis)) /
           static_cast<double>(counts_[static_cast<std::size_t>(axis)] - 1);
  }

  double max_spacing() const {
    double h = 0.0;
    for (Eigen::Index a = 0; a < dimension(); ++a) h = std::max(h, spacing(a));
    return h;
  }

  double coordinate(Eigen::Index axis, int i) const {
    const double lo = box_.lower(axis);
    const double hi = box_.upper(axis);
    const int last = counts_[static_cast<std::size_t>(axis)] - 1;
    if (i == last) return hi;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(last);
  }

  Point point(std::size_t flat) const {
    Point p(dimension());
    for (Eigen::Index a = dimension() - 1; a >= 0; --a) {
      const auto c = static_cast<std::size_t>(counts_[static_cast<std::size_t>(a)]);
      p(a) = coordinate(a, static_cast<int>(flat % c));
      flat /= c;
    }
    return p;
  }

  std::vector<Point> points() const {
    std::vector<Point> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(point(i));
    return out;
  }

  // Same box, each axis refined to 2(c-1)+1 nodes so old nodes are kept.
  Grid doubled() const {
    std::vector<int> c = counts_;
    for (int& v : c) v = 2 * (v - 1) + 1;
    return Grid(box_, std::move(c));
  }

 private:
  Box box_;
  std::vector<int> counts_;
};

}  // namespace gauge_certify
