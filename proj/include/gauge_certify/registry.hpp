#pragma once

#include "gauge_certify/expression.hpp"
#include "gauge_certify/subdiff.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace gauge_certify {

/// Parameters for the parameterized registry entries.
struct RegistryParams {
  // max_affine: max_j <slopes[j], x> + intercepts[j]. Empty means the default
  // pieces x1 and 2*x1.
  std::vector<Covector> slopes;
  std::vector<double> intercepts;
  // indicator_box: 0 on [box_lo, box_hi]^n, +inf elsewhere
  double box_lo = -0.5;
  double box_hi = 0.5;
  // step: 0 for x1 <= step_at, 1 for x1 > step_at
  double step_at = 0.5;
};

inline constexpr std::array<std::string_view, 7> kRegistryNames = {
    "quadratic", "abs", "neg_abs", "cube", "max_affine", "indicator_box", "step"};

inline bool is_registry_name(std::string_view name) {
  for (auto n : kRegistryNames) {
    if (n == name) return true;
  }
  return false;
}

namespace detail {

inline double sign(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

// Vertices of the l1 subdifferential: each zero coordinate contributes +-1.
inline std::vector<Covector> abs_subgradients(const Point& x) {
  std::vector<Eigen::Index> zeros;
  Covector base(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    base(i) = sign(x(i));
    if (x(i) == 0.0) zeros.push_back(i);
  }
  std::vector<Covector> out;
  const std::size_t total = std::size_t{1} << zeros.size();
  for (std::size_t mask = 0; mask < total; ++mask) {
    Covector g = base;
    for (std::size_t j = 0; j < zeros.size(); ++j) {
      g(zeros[j]) = (mask >> j) & 1U ? 1.0 : -1.0;
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace detail

/// Builds a registry function on the given domain box. Formulas are listed in
/// docs/functions.md.
inline FunctionOracle registry_function(std::string_view name, const Box& domain,
                                        const RegistryParams& params = {}) {
  const Eigen::Index n = domain.dimension();
  FunctionOracle f;
  f.name = std::string(name);
  f.domain_hint = domain;

  if (name == "quadratic") {
    f.eval = [](const Point& x) { return x.squaredNorm(); };
    f.analytic_subgrad = [](const Point& x) { return std::vector<Covector>{2.0 * x}; };
  } else if (name == "abs") {
    f.eval = [](const Point& x) { return x.lpNorm<1>(); };
    f.analytic_subgrad = detail::abs_subgradients;
  } else if (name == "neg_abs") {
    f.eval = [](const Point& x) { return -x.lpNorm<1>(); };
    // the proximal (and Fenchel) subdifferential is empty on the kinks
    f.analytic_subgrad = [](const Point& x) {
      if ((x.array() == 0.0).any()) return std::vector<Covector>{};
      return std::vector<Covector>{-x.unaryExpr(&detail::sign)};
    };
  } else if (name == "cube") {
    f.eval = [](const Point& x) { return x.array().cube().sum(); };
    f.analytic_subgrad = [](const Point& x) {
      return std::vector<Covector>{3.0 * x.array().square().matrix()};
    };
  } else if (name == "max_affine") {
    std::vector<Covector> slopes = params.slopes;
    std::vector<double> icpt = params.intercepts;
    if (slopes.empty()) {
      Covector a = Covector::Zero(n);
      a(0) = 1.0;
      slopes = {a, 2.0 * a};
      icpt = {0.0, 0.0};
    }
    if (icpt.empty()) icpt.assign(slopes.size(), 0.0);
    if (icpt.size() != slopes.size()) {
      throw InvalidInput("max_affine: slopes and intercepts differ in length");
    }
    for (const auto& s : slopes) require_dimension(s, n, "max_affine slope");
    f.eval = [slopes, icpt](const Point& x) {
      double m = -kInf;
      for (std::size_t j = 0; j < slopes.size(); ++j) {
        m = std::max(m, slopes[j].dot(x) + icpt[j]);
      }
      return m;
    };
    f.analytic_subgrad = [slopes, icpt](const Point& x) {
      double m = -kInf;
      for (std::size_t j = 0; j < slopes.size(); ++j) {
        m = std::max(m, slopes[j].dot(x) + icpt[j]);
      }
      std::vector<Covector> active;
      for (std::size_t j = 0; j < slopes.size(); ++j) {
        if (slopes[j].dot(x) + icpt[j] >= m - 1e-12) active.push_back(slopes[j]);
      }
      return active;
    };
  } else if (name == "indicator_box") {
    const double lo = params.box_lo;
    const double hi = params.box_hi;
    if (!(lo < hi)) throw InvalidInput("indicator_box: need box_lo < box_hi");
    f.eval = [lo, hi](const Point& x) {
      return ((x.array() >= lo).all() && (x.array() <= hi).all()) ? 0.0 : kInf;
    };
    f.analytic_subgrad = [lo, hi](const Point& x) {
      if (!((x.array() >= lo).all() && (x.array() <= hi).all())) {
        return std::vector<Covector>{};
      }
      return std::vector<Covector>{Covector::Zero(x.size())};
    };
  } else if (name == "step") {
    const double at = params.step_at;
    f.eval = [at](const Point& x) { return x(0) <= at ? 0.0 : 1.0; };
    f.analytic_subgrad = [](const Point& x) {
      return std::vector<Covector>{Covector::Zero(x.size())};
    };
  } else {
    throw InvalidInput("unknown function '" + std::string(name) +
                       "' (known: quadratic, abs, neg_abs, cube, max_affine, "
                       "indicator_box, step)");
  }
  return f;
}

inline FunctionOracle expression_function(const std::string& text, const Box& domain) {
  const Expression e = Expression::parse(text);
  if (e.arity() > domain.dimension()) {
    throw InvalidInput("expression '" + text + "' needs dimension " +
                       std::to_string(e.arity()));
  }
  FunctionOracle f;
  f.name = "expr:" + text;
  f.domain_hint = domain;
  f.eval = [e](const Point& x) {
    const double v = e(x);
    return std::isnan(v) ? kInf : v;
  };
  return f;
}

}  // namespace gauge_certify
