#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace gauge_certify;

namespace {

const Box kLine = Box::cube(1, -1, 1);

GraphSample sample(double x, double xstar, double fx) {
  return {scalar_point(x), scalar_point(xstar), fx};
}

SubgradientGraph analytic_quadratic_graph(double spacing) {
  SubgradientGraph g;
  const int n = static_cast<int>(std::lround(2 / spacing)) + 1;
  for (double x : oracle::linspace(-1, 1, n)) g.samples.push_back(sample(x, 2 * x, x * x));
  return g;
}

SamplingOptions line_sampling(int resolution) {
  SamplingOptions s;
  s.grid = Grid::uniform(kLine, resolution);
  return s;
}

CertifyOptions certify_options(int resolution) {
  CertifyOptions o;
  o.sampling = line_sampling(resolution);
  return o;
}

}  // namespace

TEST(Monotonicity, QuadraticGraphIsMonotone) {
  const auto g = sample_graph(registry_function("quadratic", kLine), line_sampling(101));
  const auto r = monotonicity_check(g, kSampledTol);
  EXPECT_TRUE(r.monotone());
  EXPECT_GE(r.worst_value, -1e-12);
}

TEST(Monotonicity, NegAbsPairGivesMinusFour) {
  SubgradientGraph g;
  g.samples = {sample(-1, 1, -1), sample(1, -1, -1)};
  const auto r = monotonicity_check(g, kSampledTol);
  EXPECT_FALSE(r.monotone());
  EXPECT_DOUBLE_EQ(r.worst_value, -4.0);
  ASSERT_TRUE(r.worst_pair.has_value());
  EXPECT_EQ(r.worst_pair->first.x(0), -1);
  EXPECT_EQ(r.worst_pair->second.x(0), 1);
}

TEST(Monotonicity, SingletonIsVacuous) {
  SubgradientGraph g;
  g.samples = {sample(0.3, 1, 0)};
  const auto r = monotonicity_check(g, kSampledTol);
  EXPECT_TRUE(r.monotone());
  EXPECT_EQ(r.worst_value, kInf);
  EXPECT_FALSE(r.worst_pair.has_value());
}

TEST(Monotonicity, EmptyGraphThrows) {
  EXPECT_THROW(monotonicity_check(SubgradientGraph{}, 1e-6), EmptyGraph);
}

TEST(Monotonicity, MatchesBruteForceMinimum) {
  oracle::Sampler rng(59);
  SubgradientGraph g;
  for (int i = 0; i < 200; ++i) g.samples.push_back({rng.box(2, -1, 1), rng.box(2, -1, 1), 0});
  double brute = kInf;
  for (const auto& a : g.samples) {
    for (const auto& b : g.samples) {
      if (&a == &b) continue;
      const double v = (a.xstar(0) - b.xstar(0)) * (a.x(0) - b.x(0)) +
                       (a.xstar(1) - b.xstar(1)) * (a.x(1) - b.x(1));
      brute = std::min(brute, v);
    }
  }
  EXPECT_NEAR(monotonicity_check(g, 1e-6).worst_value, brute, 1e-12);
}

TEST(Minty, AbsHalfIsRelatedAndFenchelAgrees) {
  const auto f = registry_function("abs", Box::cube(1, -2, 2));
  SamplingOptions s;
  s.grid = Grid::uniform(Box::cube(1, -2, 2), 201);
  const auto g = sample_graph(f, s);
  const auto r = minty_test(g, scalar_point(0), scalar_point(0.5), kSampledTol);
  EXPECT_TRUE(r.related);
  EXPECT_FALSE(r.witness.has_value());
  const auto grid = Grid::uniform(Box::cube(1, -2, 2), 201).points();
  EXPECT_TRUE(fenchel_membership(f, scalar_point(0), scalar_point(0.5), grid, 1e-9).holds);
}

TEST(Minty, QuadraticAtMinimum) {
  const auto g = sample_graph(registry_function("quadratic", kLine), line_sampling(101));
  EXPECT_TRUE(minty_test(g, scalar_point(0), scalar_point(0), kSampledTol).related);
}

TEST(Minty, AbsSlopeAboveOneIsRejected) {
  const auto g = sample_graph(registry_function("abs", kLine), line_sampling(101));
  const auto r = minty_test(g, scalar_point(0), scalar_point(1.5), kSampledTol);
  EXPECT_FALSE(r.related);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_GT(r.witness->x(0), 0.0);
}

TEST(Minty, EmptyGraphIsVacuouslyTrue) {
  const auto r = minty_test(SubgradientGraph{}, scalar_point(0), scalar_point(1), 1e-6);
  EXPECT_TRUE(r.related);
  EXPECT_TRUE(r.warning.has_value());
}

TEST(Minty, EveryElementOfAMonotoneGraphIsRelated) {
  for (const char* name : {"quadratic", "abs", "max_affine"}) {
    const auto g = sample_graph(registry_function(name, kLine), line_sampling(51));
    ASSERT_TRUE(monotonicity_check(g, kSampledTol).monotone());
    for (const auto& s : g.samples) {
      EXPECT_TRUE(minty_test(g, s.x, s.xstar, kSampledTol).related) << name;
    }
  }
}

TEST(Envelope, ThreeTangents) {
  SubgradientGraph g;
  g.samples = {sample(-1, -2, 1), sample(0, 0, 0), sample(1, 2, 1)};
  EXPECT_DOUBLE_EQ(envelope(g, scalar_point(0.5)), 0.0);
  EXPECT_DOUBLE_EQ(envelope(g, scalar_point(1)), 1.0);
}

TEST(Envelope, DenseQuadraticAgainstBruteForce) {
  const auto g = analytic_quadratic_graph(0.01);
  std::vector<double> xs, gs, fs;
  for (const auto& s : g.samples) {
    xs.push_back(s.x(0));
    gs.push_back(s.xstar(0));
    fs.push_back(s.fx);
  }
  const double env = envelope(g, scalar_point(0.5));
  EXPECT_NEAR(env, 0.25, 1e-4);
  EXPECT_DOUBLE_EQ(env, oracle::envelope_max(xs, gs, fs, 0.5));
}

TEST(Envelope, ExactAtSamplePointsOfConvexFunction) {
  const auto g = analytic_quadratic_graph(0.05);
  for (const auto& s : g.samples) EXPECT_DOUBLE_EQ(envelope(g, s.x), s.fx);
}

TEST(Envelope, EmptyGraphThrows) {
  EXPECT_THROW(envelope(SubgradientGraph{}, scalar_point(0)), EmptyGraph);
}

TEST(EnvelopeProperty, MidpointConvex) {
  const auto g = sample_graph(registry_function("cube", kLine), line_sampling(51));
  oracle::Sampler rng(61);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.uniform(-1, 1);
    const double b = rng.uniform(-1, 1);
    const double m = envelope(g, scalar_point(0.5 * (a + b)));
    const double ga = envelope(g, scalar_point(a));
    const double gb = envelope(g, scalar_point(b));
    ASSERT_LE(m, 0.5 * (ga + gb) + 1e-12 * (1 + std::abs(ga) + std::abs(gb)));
  }
}

TEST(EnvelopeProperty, MinorantOfConvexRegistryFunctions) {
  for (const char* name : {"quadratic", "abs", "max_affine", "indicator_box"}) {
    const auto f = registry_function(name, kLine);
    const auto opt = line_sampling(101);
    const auto g = sample_graph(f, opt);
    const auto sf = sample_function(f, opt.grid);
    const double slack = empirical_lipschitz(sf) * opt.grid.max_spacing();
    for (const auto& x : sf.nodes) {
      const double fx = f(x);
      if (!std::isfinite(fx)) continue;
      EXPECT_LE(envelope(g, x), fx + slack + kSampledTol) << name << " at " << x(0);
    }
  }
}

TEST(EnvelopeProperty, SupFormDominatesNearSamples) {
  for (const char* name : {"neg_abs", "cube", "quadratic"}) {
    const auto f = registry_function(name, kLine);
    const auto opt = line_sampling(101);
    const auto g = sample_graph(f, opt);
    const auto sf = sample_function(f, opt.grid);
    const double h = opt.grid.max_spacing();
    double gmax = 0;
    for (const auto& s : g.samples) gmax = std::max(gmax, s.xstar.norm());
    const double slack = (empirical_lipschitz(sf) + gmax) * h;
    for (const auto& x : sf.nodes) {
      bool dense = false;
      for (const auto& s : g.samples) dense = dense || (s.x - x).norm() <= h;
      if (!dense) continue;
      EXPECT_GE(envelope(g, x), f(x) - slack) << name << " at " << x(0);
    }
  }
}

TEST(ScalingProperty, PositiveMultipleScalesWorstValue) {
  const auto g = sample_graph(registry_function("neg_abs", kLine), line_sampling(101));
  const double base = monotonicity_check(g, kSampledTol).worst_value;
  for (double c : {0.5, 3.0}) {
    SubgradientGraph h = g;
    for (auto& s : h.samples) {
      s.xstar *= c;
      s.fx *= c;
    }
    const auto r = monotonicity_check(h, kSampledTol);
    EXPECT_FALSE(r.monotone());
    EXPECT_NEAR(r.worst_value, c * base, 1e-12 * c * std::abs(base));
  }
  const auto q = sample_graph(registry_function("quadratic", kLine), line_sampling(51));
  SubgradientGraph q3 = q;
  for (auto& s : q3.samples) s.xstar *= 3;
  EXPECT_TRUE(monotonicity_check(q3, kSampledTol).monotone());
}

TEST(Certify, QuadraticAtHundredthSpacing) {
  const auto rep = certify_convexity(registry_function("quadratic", kLine), certify_options(201));
  EXPECT_EQ(rep.verdict, Verdict::CertifiedConvex);
  EXPECT_LE(rep.envelope_gap, 1e-3);
  EXPECT_NEAR(rep.spacing, 0.01, 1e-15);
  EXPECT_DOUBLE_EQ(rep.gap_tol, 100 * rep.spacing * rep.lipschitz_estimate);
}

TEST(Certify, NegAbsWitnessPair) {
  const auto rep = certify_convexity(registry_function("neg_abs", kLine), certify_options(201));
  EXPECT_EQ(rep.verdict, Verdict::NonconvexWitnessed);
  ASSERT_TRUE(rep.monotonicity && rep.monotonicity->worst_pair);
  EXPECT_LE(rep.monotonicity->worst_value, -3.9);
  const auto& [a, b] = *rep.monotonicity->worst_pair;
  EXPECT_LT(a.x(0) * b.x(0), 0.0);
  EXPECT_NEAR(std::abs(a.xstar(0)), 1.0, 1e-9);
  EXPECT_NEAR(a.xstar(0), -b.xstar(0), 1e-9);
}

TEST(Certify, MaxAffineReproducesPieces) {
  const auto f = registry_function("max_affine", kLine);
  const auto rep = certify_convexity(f, certify_options(201));
  EXPECT_EQ(rep.verdict, Verdict::CertifiedConvex);
  const auto g = sample_graph(f, line_sampling(201));
  for (const auto& s : g.samples) EXPECT_NEAR(envelope(g, s.x), s.fx, 1e-12);
}

TEST(Certify, RegistryVerdicts) {
  for (const char* name : {"quadratic", "abs", "max_affine", "indicator_box"}) {
    EXPECT_EQ(certify_convexity(registry_function(name, kLine), certify_options(101)).verdict,
              Verdict::CertifiedConvex)
        << name;
  }
  for (const char* name : {"neg_abs", "cube", "step"}) {
    const auto rep = certify_convexity(registry_function(name, kLine), certify_options(101));
    EXPECT_EQ(rep.verdict, Verdict::NonconvexWitnessed) << name;
    const bool pair = rep.monotonicity && !rep.monotonicity->monotone() &&
                      rep.monotonicity->worst_pair.has_value();
    EXPECT_TRUE(pair || rep.excess_witness.has_value()) << name;
  }
}

TEST(Certify, IndicatorSkipsPointsOutsideDomain) {
  const auto rep =
      certify_convexity(registry_function("indicator_box", kLine), certify_options(101));
  EXPECT_GT(rep.skipped_points, 0u);
  EXPECT_EQ(rep.tested_points + rep.skipped_points, 101u);
}

TEST(Certify, EmptyGraphIsInconclusive) {
  const auto rep = certify_convexity(expression_function("inf", kLine), certify_options(21));
  EXPECT_EQ(rep.verdict, Verdict::Inconclusive);
  EXPECT_FALSE(rep.diagnostics.empty());
}

TEST(Certify, TightGapToleranceIsInconclusive) {
  auto opt = certify_options(21);
  opt.gap_tol = 1e-12;
  opt.test_points = {scalar_point(0.333)};
  const auto rep = certify_convexity(registry_function("quadratic", kLine), opt);
  EXPECT_EQ(rep.verdict, Verdict::Inconclusive);
  EXPECT_GT(rep.envelope_gap, 1e-12);
}

TEST(Certify, ThinningKeepsCap) {
  SubgradientGraph g = analytic_quadratic_graph(0.0001);
  const auto t = thin_graph(g, 500);
  EXPECT_EQ(t.size(), 500u);
  EXPECT_EQ(t.samples.front().x, g.samples.front().x);
  EXPECT_EQ(thin_graph(g, 1'000'000).size(), g.size());
}

TEST(Certify, VerdictNames) {
  EXPECT_STREQ(to_string(Verdict::CertifiedConvex), "certified-convex");
  EXPECT_STREQ(to_string(Verdict::NonconvexWitnessed), "nonconvex-witnessed");
  EXPECT_STREQ(to_string(Verdict::Inconclusive), "inconclusive");
}

TEST(Certify, TwoDimensionalAbs) {
  CertifyOptions o;
  o.sampling.grid = Grid::uniform(Box::cube(2, -1, 1), 21);
  EXPECT_EQ(certify_convexity(registry_function("abs", Box::cube(2, -1, 1)), o).verdict,
            Verdict::CertifiedConvex);
  EXPECT_EQ(certify_convexity(registry_function("neg_abs", Box::cube(2, -1, 1)), o).verdict,
            Verdict::NonconvexWitnessed);
}
