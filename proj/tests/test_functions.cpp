#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace gauge_certify;

TEST(Expression, ArithmeticAndPrecedence) {
  const Point x = make_point({2, -3, 0.5});
  EXPECT_DOUBLE_EQ(Expression::parse("1 + 2 * 3")(x), 7);
  EXPECT_DOUBLE_EQ(Expression::parse("(1 + 2) * 3")(x), 9);
  EXPECT_DOUBLE_EQ(Expression::parse("x - y - z")(x), 4.5);
  EXPECT_DOUBLE_EQ(Expression::parse("x / y / 2")(x), 2.0 / -3 / 2);
  EXPECT_DOUBLE_EQ(Expression::parse("-x^2")(x), -4);
  EXPECT_DOUBLE_EQ(Expression::parse("x1^3 + x2^2")(x), 17);
  EXPECT_DOUBLE_EQ(Expression::parse("x^-2")(x), 0.25);
  EXPECT_DOUBLE_EQ(Expression::parse("x^0")(x), 1);
  EXPECT_DOUBLE_EQ(Expression::parse("2.5e-1 * 4")(x), 1);
}

TEST(Expression, Functions) {
  const Point x = make_point({2, -3});
  EXPECT_DOUBLE_EQ(Expression::parse("abs(y)")(x), 3);
  EXPECT_DOUBLE_EQ(Expression::parse("max(x, y, 7)")(x), 7);
  EXPECT_DOUBLE_EQ(Expression::parse("min(x, y)")(x), -3);
  EXPECT_DOUBLE_EQ(Expression::parse("max(x, 2*x)")(scalar_point(-1)), -1);
  EXPECT_NEAR(Expression::parse("pi")(x), M_PI, 1e-15);
  EXPECT_EQ(Expression::parse("inf")(x), kInf);
}

TEST(Expression, Arity) {
  EXPECT_EQ(Expression::parse("3").arity(), 0);
  EXPECT_EQ(Expression::parse("x").arity(), 1);
  EXPECT_EQ(Expression::parse("x + z").arity(), 3);
  EXPECT_EQ(Expression::parse("x2").arity(), 2);
}

TEST(Expression, Errors) {
  for (const char* bad : {"", "x +", "1 +* 2", "x^1.5", "x^y", "foo(x)", "abs(x, y)", "(x",
                          "x)", "w", "max()", "1 2", "#"}) {
    EXPECT_THROW(Expression::parse(bad), InvalidInput) << bad;
  }
  try {
    Expression::parse("x + $");
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("column 5"), std::string::npos) << e.what();
  }
}

TEST(Expression, VariableBeyondDimensionThrows) {
  EXPECT_THROW(Expression::parse("y")(scalar_point(1)), InvalidInput);
}

TEST(ExpressionFunction, NanBecomesInfinity) {
  const auto f = expression_function("0/0", Box::cube(1, -1, 1));
  EXPECT_EQ(f(scalar_point(0.3)), kInf);
  EXPECT_THROW(expression_function("x + y", Box::cube(1, -1, 1)), InvalidInput);
}

TEST(ExpressionFunction, NegativeInfinityRejectedByOracle) {
  const auto f = expression_function("-inf", Box::cube(1, -1, 1));
  EXPECT_THROW(f(scalar_point(0)), InvalidInput);
}

TEST(Registry, Formulas) {
  const Box box = Box::cube(2, -1, 1);
  const Point x = make_point({0.5, -0.25});
  EXPECT_DOUBLE_EQ(registry_function("quadratic", box)(x), 0.3125);
  EXPECT_DOUBLE_EQ(registry_function("abs", box)(x), 0.75);
  EXPECT_DOUBLE_EQ(registry_function("neg_abs", box)(x), -0.75);
  EXPECT_DOUBLE_EQ(registry_function("cube", box)(x), 0.125 - 0.015625);
  EXPECT_DOUBLE_EQ(registry_function("max_affine", box)(x), 1.0);
  EXPECT_DOUBLE_EQ(registry_function("max_affine", box)(make_point({-0.5, 0})), -0.5);
  EXPECT_DOUBLE_EQ(registry_function("indicator_box", box)(x), 0.0);
  EXPECT_EQ(registry_function("indicator_box", box)(make_point({0.6, 0})), kInf);
  EXPECT_DOUBLE_EQ(registry_function("step", box)(x), 0.0);
  EXPECT_DOUBLE_EQ(registry_function("step", box)(make_point({0.51, 0})), 1.0);
}

TEST(Registry, StepIsLowerSemicontinuousAtTheJump) {
  const auto f = registry_function("step", Box::cube(1, -1, 1));
  EXPECT_EQ(f(scalar_point(0.5)), 0.0);
  for (int j = 3; j < 15; ++j) EXPECT_GE(f(scalar_point(0.5 + std::pow(10.0, -j))), f(scalar_point(0.5)));
}

TEST(Registry, ParameterizedPieces) {
  RegistryParams p;
  p.slopes = {scalar_point(-1), scalar_point(1)};
  p.intercepts = {0, -1};
  const auto f = registry_function("max_affine", Box::cube(1, -2, 2), p);
  EXPECT_DOUBLE_EQ(f(scalar_point(2)), 1);
  EXPECT_DOUBLE_EQ(f(scalar_point(0)), 0);
  p.intercepts = {0};
  EXPECT_THROW(registry_function("max_affine", Box::cube(1, -2, 2), p), InvalidInput);
  EXPECT_THROW(registry_function("nope", Box::cube(1, -2, 2)), InvalidInput);
}

TEST(Registry, AnalyticSubgradientsAreFenchelForConvexEntries) {
  const Box box = Box::cube(2, -1, 1);
  std::vector<Point> grid = Grid::uniform(box, 41).points();
  for (const char* name : {"quadratic", "abs", "max_affine", "indicator_box"}) {
    const auto f = registry_function(name, box);
    for (const Point& x : Grid::uniform(Box::cube(2, -0.5, 0.5), 11).points()) {
      for (const Covector& g : f.analytic_subgrad(x)) {
        EXPECT_TRUE(fenchel_membership(f, x, g, grid, kAnalyticTol).holds) << name;
      }
    }
  }
}

TEST(Registry, AbsKinkVerticesAndNegAbsEmpty) {
  const Box box = Box::cube(2, -1, 1);
  EXPECT_EQ(registry_function("abs", box).analytic_subgrad(make_point({0, 0.3})).size(), 2u);
  EXPECT_EQ(registry_function("abs", box).analytic_subgrad(make_point({0, 0})).size(), 4u);
  EXPECT_TRUE(registry_function("neg_abs", box).analytic_subgrad(make_point({0, 0.3})).empty());
}

TEST(Config, Defaults) {
  RunConfig c;
  EXPECT_NO_THROW(validate(c));
  EXPECT_EQ(c.resolution, 201);
  EXPECT_EQ(c.lambdas, (std::vector<double>{0.1, 0.01}));
  EXPECT_EQ(c.tilts, 5);
  EXPECT_EQ(make_function(c).name, "quadratic");
}

TEST(Config, ValidationMessages) {
  RunConfig c;
  c.dimension = 4;
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.resolution = 1;
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.function = "nope";
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.tol = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.domain = {1, -1};
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.lambdas = {0.1, -1};
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Config, DomainBoxPerAxisOrShared) {
  RunConfig c;
  c.dimension = 2;
  c.domain = {-1, 2};
  EXPECT_EQ(domain_box(c).upper, make_point({2, 2}));
  c.domain = {-1, 2, 0, 3};
  EXPECT_EQ(domain_box(c).lower, make_point({-1, 0}));
  EXPECT_EQ(domain_box(c).upper, make_point({2, 3}));
}

TEST(Config, NumberListParsing) {
  EXPECT_EQ(parse_number_list("1, -2.5,3e-1", "t"), (std::vector<double>{1, -2.5, 0.3}));
  EXPECT_THROW(parse_number_list("1,,2", "t"), ConfigError);
  EXPECT_THROW(parse_number_list("1,a", "t"), ConfigError);
  EXPECT_THROW(parse_number_list("", "t"), ConfigError);
}

TEST(Config, ApplyJsonOverlaysKeys) {
  RunConfig c;
  apply_json(c, nlohmann::json::parse(R"({"function":"abs","resolution":51,"lambda":[0.5],
      "tilt_values":"-1,0,1","body":"ball:2:inf","params":{"box":[-0.2,0.3],"step_at":0}})"));
  EXPECT_EQ(c.function, "abs");
  EXPECT_EQ(c.resolution, 51);
  EXPECT_EQ(c.lambdas, std::vector<double>{0.5});
  EXPECT_EQ(c.tilt_values, (std::vector<double>{-1, 0, 1}));
  EXPECT_EQ(c.body["type"], "ball");
  EXPECT_DOUBLE_EQ(c.params.box_lo, -0.2);
  EXPECT_DOUBLE_EQ(c.params.step_at, 0.0);
  EXPECT_THROW(apply_json(c, nlohmann::json::parse(R"({"bogus":1})")), ConfigError);
  EXPECT_THROW(apply_json(c, nlohmann::json::parse(R"({"resolution":"x"})")), ConfigError);
}

TEST(Config, BodySpecs) {
  const auto ball = body_from_json(body_spec_to_json("ball:2:1"), 2);
  EXPECT_DOUBLE_EQ(gauge(ball, make_point({1, 1})).value, 1.0);
  const auto tube = body_from_json(body_spec_to_json("tube:0,0;1,0;0.5"), 2);
  EXPECT_NEAR(radius_bounds(tube).outer, 1.5, 1e-15);
  const auto poly = body_from_json(body_spec_to_json("polytope:0.5;-1"), 1);
  EXPECT_DOUBLE_EQ(gauge(poly, scalar_point(1)).value, 0.5);
  const auto json = body_from_json(
      body_spec_to_json(R"({"type":"tube","p":[1],"q":[2],"delta":0.5,"anchor":[1.5]})"), 1);
  EXPECT_TRUE(contains(json, scalar_point(0.9)));
  EXPECT_FALSE(contains(json, scalar_point(1.1)));
  EXPECT_THROW(body_spec_to_json("cone:1"), ConfigError);
  EXPECT_THROW(body_spec_to_json("tube:0;1"), ConfigError);
  EXPECT_THROW(body_from_json(body_spec_to_json("ball:1:3"), 1), ConfigError);
  EXPECT_THROW(body_from_json(body_spec_to_json("tube:0;1;-1"), 1), ConfigError);
  EXPECT_THROW(body_from_json(body_spec_to_json("polytope:1"), 1), ConfigError);
}
