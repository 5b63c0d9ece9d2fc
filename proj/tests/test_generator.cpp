#include "kuranishi/generator.hpp"
#include "kuranishi/validators.hpp"
#include "kuranishi/vfc.hpp"

#include <gtest/gtest.h>

using namespace kuranishi;

namespace {

GlobalProblem problem(std::vector<std::string> F, std::vector<std::pair<std::string, std::string>> box) {
  Json j;
  j["section"] = F;
  Json reg = Json::array();
  for (const auto& [lo, hi] : box) reg.push_back({lo, hi});
  j["region"] = reg;
  return GlobalProblem::from_json(j);
}

CheckOptions opts(int density = 20, std::uint64_t seed = 3) {
  CheckOptions o;
  o.density = density;
  o.seed = seed;
  return o;
}

RationalMatrix unit(int m, std::vector<int> cols) {
  RationalMatrix E(m, static_cast<int>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) E(cols[c], static_cast<int>(c)) = 1;
  return E;
}

int pipeline_count(const Atlas& a, std::uint64_t seed = 1) {
  Atlas t = find_tame_shrinking(a, opts()).atlas;
  ReductionContext ctx = reduce_for_count(t, ReductionStyle::Flag, 1.0, opts());
  PerturbOptions po;
  po.check = opts();
  Perturbation p = build_adapted(ctx, seed, po);
  return vfc_count(ctx, p, opts()).count;
}

}  // namespace

TEST(Oracle, OneDimensionalSignChanges) {
  auto r = brute_force_degree(problem({"x1^3 - x1"}, {{"-2", "2"}}));
  EXPECT_EQ(r.degree, 1);
  ASSERT_EQ(r.roots.size(), 3u);
  EXPECT_NEAR(r.roots[0][0], -1.0, 1e-12);
  EXPECT_NEAR(r.roots[1][0], 0.0, 1e-12);
  EXPECT_NEAR(r.roots[2][0], 1.0, 1e-12);
  EXPECT_EQ(brute_force_degree(problem({"x1^4 - x1^2"}, {{"-2", "2"}})).degree, 0);
  EXPECT_EQ(brute_force_degree(problem({"1 - x1"}, {{"-2", "2"}})).degree, -1);
}

TEST(Oracle, WindingNumber) {
  EXPECT_EQ(brute_force_degree(problem({"x1^2 - x2^2 - 1/4", "2*x1*x2"}, {{"-2", "2"}, {"-2", "2"}})).degree, 2);
  // z^3 and conj(z)
  EXPECT_EQ(brute_force_degree(problem({"x1^3 - 3*x1*x2^2", "3*x1^2*x2 - x2^3"}, {{"-1", "1"}, {"-1", "1"}})).degree, 3);
  EXPECT_EQ(brute_force_degree(problem({"x1", "-x2"}, {{"-1", "1"}, {"-1", "1"}})).degree, -1);
  EXPECT_EQ(brute_force_degree(problem({"x1 - 5", "x2"}, {{"-1", "1"}, {"-1", "1"}})).degree, 0);
}

TEST(Oracle, SolidAngle) {
  EXPECT_EQ(brute_force_degree(problem({"x1", "x2", "x3"}, {{"-1", "1"}, {"-1", "2"}, {"-1", "1"}})).degree, 1);
  EXPECT_EQ(brute_force_degree(problem({"x1", "x2", "-x3"}, {{"-1", "1"}, {"-1", "1"}, {"-1", "1"}})).degree, -1);
  EXPECT_EQ(brute_force_degree(problem({"x1^3 - 1/4*x1", "x2", "x3"}, {{"-1", "1"}, {"-1", "1"}, {"-1", "1"}})).degree,
            1);
  EXPECT_EQ(brute_force_degree(problem({"x1^2 + 1/4", "x2", "x3"}, {{"-1", "1"}, {"-1", "1"}, {"-1", "1"}})).degree, 0);
}

TEST(Oracle, ZeroOnBoundaryIsRejected) {
  EXPECT_THROW(brute_force_degree(problem({"x1 - 2"}, {{"-2", "2"}})), AtlasError);
  EXPECT_THROW(brute_force_degree(problem({"x1 - 1", "x2"}, {{"-1", "1"}, {"-1", "1"}})), AtlasError);
}

TEST(Generator, ProblemJsonRoundTrip) {
  GlobalProblem p = problem_by_name("three_chart");
  GlobalProblem q = GlobalProblem::from_json(Json::parse(p.to_json().dump()));
  EXPECT_EQ(q.to_json().dump(), p.to_json().dump());
  EXPECT_EQ(q.n(), 3);
}

TEST(Generator, ImplicitChartIsExact) {
  GlobalProblem p = problem_by_name("three_chart");
  Vec c(3);
  c << 0.5, 0, 0;
  ReducedChart r = reduce_chart(p, {{2}, c, unit(3, {1}), 0.3});
  EXPECT_EQ(r.free, std::vector<int>{1});
  EXPECT_EQ(r.chart.dim(), 1);
  EXPECT_EQ(r.embedding[0], Polynomial::constant(1, Rational(1, 2)));
  EXPECT_EQ(r.embedding[2], Polynomial(1));
  EXPECT_EQ(r.fit_residual, 0.0);
  EXPECT_EQ(r.orientation, 1);
  EXPECT_EQ(r.chart.section.components()[0], Polynomial::variable(1, 0));
}

TEST(Generator, NonlinearSolutionIsFitted) {
  // x2 = x1^2 on the curve x2 - x1^2 = 0, obstruction in the second slot of (x2 - x1^2, x3)
  GlobalProblem p = problem({"x2 - x1^2", "x3 + x1*x2"}, {{"-1", "1"}, {"-1", "1"}, {"-1", "1"}});
  ReducedChart r = reduce_chart(p, {{1}, Vec::Zero(3), unit(2, {1}), 0.5});
  EXPECT_EQ(r.free, (std::vector<int>{0, 2}));
  EXPECT_EQ(r.embedding[1], Polynomial::parse("x1^2", 2));
  EXPECT_LT(r.fit_residual, 1e-9);
  // section = x3 + x1^3
  EXPECT_EQ(r.chart.section.components()[0], Polynomial::parse("x2 + x1^3", 2));
}

TEST(Generator, PointChartCarriesLocalDegree) {
  GlobalProblem p = problem({"x1 - x2", "x1 + x2"}, {{"-1", "1"}, {"-1", "1"}});
  ReducedChart r = reduce_chart(p, {{1}, Vec::Zero(2), RationalMatrix(2, 0), 0});
  EXPECT_EQ(r.chart.dim(), 0);
  EXPECT_EQ(r.chart.obstruction_dim, 0);
  EXPECT_EQ(r.orientation, 1);
  GlobalProblem q = problem({"x2", "x1"}, {{"-1", "1"}, {"-1", "1"}});
  EXPECT_EQ(reduce_chart(q, {{1}, Vec::Zero(2), RationalMatrix(2, 0), 0}).orientation, -1);
}

TEST(Generator, DegenerateZeroNeedsObstruction) {
  GlobalProblem p = problem_by_name("quartic");
  try {
    reduce_chart(p, {{1}, Vec::Zero(1), RationalMatrix(1, 0), 0});
    FAIL() << "expected a rank error";
  } catch (const AtlasError& e) {
    EXPECT_EQ(e.kind(), AtlasError::Kind::Rank);
  }
}

TEST(Generator, DependentSumIsRejected) {
  GlobalProblem p = problem_by_name("three_chart");
  Vec c(3);
  c << 0.5, 0, 0;
  ReducedChart a = reduce_chart(p, {{1}, c, unit(3, {1}), 0.2});
  ReducedChart b = reduce_chart(p, {{2}, c, unit(3, {1}), 0.2});
  try {
    sum_chart(p, {&a, &b}, c, 0.2);
    FAIL() << "expected a rank error";
  } catch (const AtlasError& e) {
    EXPECT_EQ(e.kind(), AtlasError::Kind::Rank);
  }
}

TEST(Generator, SumChartChanges) {
  GeneratedAtlas g = generate("three_chart");
  EXPECT_EQ(g.atlas.index_sets.size(), 7u);
  EXPECT_EQ(g.atlas.basic_count, 3);
  const auto& ch = g.atlas.change({1}, {1, 2});
  auto y = ch.apply(Vec::Constant(1, 0.6));
  ASSERT_TRUE(y.has_value());
  EXPECT_EQ((*y)[0], 0.6);
  EXPECT_EQ((*y)[1], 0.0);
  EXPECT_FALSE(ch.contains(Vec::Constant(1, 0.1)));
  EXPECT_EQ(g.atlas.change({2}, {1, 2, 3}).hat_phi(), unit(3, {1}));
  Atlas back = parse_atlas(Json::parse(atlas_json(g.atlas).dump()));
  EXPECT_EQ(atlas_json(back).dump(), atlas_json(g.atlas).dump());
}

TEST(Generator, GeneratedAtlasesValidate) {
  for (const auto& name : generator_names()) {
    GeneratedAtlas g = generate(name);
    auto v = validate_atlas(g.atlas, opts());
    for (const auto& x : v) EXPECT_TRUE(x.passed()) << name << "\n" << verdict_json(x).dump(2);
    EXPECT_TRUE(validate_orientation(g.atlas, opts()).passed()) << name;
  }
}

TEST(Generator, CountMatchesOracle) {
  for (const auto& name : generator_names()) {
    GeneratedAtlas g = generate(name);
    int oracle = brute_force_degree(g.problem).degree;
    EXPECT_EQ(pipeline_count(g.atlas), oracle) << name;
  }
}

TEST(Generator, ThreeChartFixtureIsAdapted) {
  GeneratedAtlas g = generate("three_chart");
  Atlas t = find_tame_shrinking(g.atlas, opts()).atlas;
  ReductionContext ctx = reduce_for_count(t, ReductionStyle::Flag, 1.0, opts());
  EXPECT_GT(ctx.sigma, 1e-6);
  PerturbOptions po;
  po.check = opts();
  Perturbation p = build_adapted(ctx, 2, po);
  auto v = verify_adapted(p, opts());
  EXPECT_TRUE(v.passed()) << verdict_json(v).dump(2);
}
