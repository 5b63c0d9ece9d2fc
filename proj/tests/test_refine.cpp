#include "kuranishi/fixtures.hpp"
#include "kuranishi/refine.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace kuranishi;

namespace {

CheckOptions opts(int density = 20, std::uint64_t seed = 3) {
  CheckOptions o;
  o.density = density;
  o.seed = seed;
  return o;
}

Box interval(const char* lo, const char* hi) { return Box({parse_rational(lo)}, {parse_rational(hi)}); }

ReductionContext linear_context(double delta = 0.0) {
  Atlas a = parse_atlas(fixtures::single_chart({"x1"}, {{"-2", "2"}}));
  return make_context(a, {{{1}, {interval("-1", "1")}}}, {{{1}, {interval("-1/2", "1/2")}}}, opts(), delta);
}

}  // namespace

TEST(Constants, DeltaVIsCappedAtQuarter) {
  Atlas a = parse_atlas(fixtures::single_chart({"x1"}, {{"-1", "2"}}));
  auto dp = compute_delta_V(a, {{{1}, {interval("0", "1")}}}, opts());
  EXPECT_EQ(dp.delta_V, 0.25);
  EXPECT_EQ(dp.margin, 1.0);
}

TEST(Constants, DeltaVFollowsBoundaryMargin) {
  Atlas a = parse_atlas(fixtures::single_chart({"x1"}, {{"-1", "2"}}));
  auto dp = compute_delta_V(a, {{{1}, {interval("-3/5", "1")}}}, opts());
  EXPECT_NEAR(dp.delta_V, 0.2, 1e-15);
}

TEST(Constants, DeltaVMonotoneUnderShrinkingV) {
  Atlas a = parse_atlas(fixtures::single_chart({"x1"}, {{"-1", "2"}}));
  double prev = 0.0;
  for (const char* lo : {"-9/10", "-3/4", "-1/2", "-1/4"}) {
    double d = compute_delta_V(a, {{{1}, {interval(lo, "1")}}}, opts()).delta_V;
    EXPECT_GE(d, prev);
    prev = d;
  }
}

TEST(Constants, EtaZeroAtUnitDelta) {
  ReductionContext ctx = linear_context();
  ctx.delta = 1.0;
  EXPECT_NEAR(ctx.eta(0), 1.0 - std::pow(2.0, -0.25), 1e-12);
  EXPECT_NEAR(ctx.eta(0), 0.1591035847, 1e-10);
  EXPECT_NEAR(ctx.eta(2), ctx.eta(0) / 4, 1e-15);
}

TEST(Constants, LevelSetRadius) {
  Atlas a = parse_atlas(fixtures::single_chart({"x1"}, {{"-2", "2"}}));
  ReductionContext ctx = make_context(a, {{{1}, {interval("0", "1")}}}, {}, opts(), 0.1);
  EXPECT_TRUE(ctx.in_Vk(1, {1}, Vec::Constant(1, -0.049)));
  EXPECT_FALSE(ctx.in_Vk(1, {1}, Vec::Constant(1, -0.051)));
  EXPECT_TRUE(ctx.in_Vk(1, {1}, Vec::Constant(1, 1.049)));
  EXPECT_GT(level_inclusion_margin(ctx, 0), 0.0);
}

TEST(Sigma, LinearSectionBound) {
  ReductionContext ctx = linear_context();
  SigmaBound s = compute_sigma(ctx, opts());
  EXPECT_LE(s.value, 0.5);
  EXPECT_GE(s.value, 0.5 - ctx.delta / 2 - s.slack);
  EXPECT_GT(s.value, 0.0);
}

TEST(Sigma, HomogeneousOnSampledMinimum) {
  ReductionContext ctx = linear_context();
  const double base = compute_sigma(ctx, opts()).sampled_min;
  for (double c : {0.5, 2.0, 10.0}) {
    ReductionContext scaled = ctx;
    scaled.norms.scale = c;
    EXPECT_EQ(compute_sigma(scaled, opts()).sampled_min, c * base) << c;
  }
}

TEST(Sigma, ZeroInRegionIsRejected) {
  Atlas a = parse_atlas(fixtures::single_chart({"x1"}, {{"-2", "2"}}));
  ReductionContext ctx = make_context(a, {{{1}, {interval("-1", "1")}}}, {{{1}, {interval("1/2", "3/4")}}}, opts());
  EXPECT_THROW(compute_sigma(ctx, opts()), RefineError);
}

TEST(Shrinking, SingleChartFirstMargin) {
  auto r = find_tame_shrinking(parse_atlas(fixtures::by_name("quartic")), opts());
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.atlas.kind, DeclaredKind::Tame);
}

TEST(Shrinking, ChangeFixtureTenthMarginIsTame) {
  auto r = find_tame_shrinking(parse_atlas(fixtures::ex_change()), opts());
  EXPECT_EQ(r.margin, Rational(1, 10));
  EXPECT_TRUE(r.tameness.passed());
  EXPECT_TRUE(check_cocycle(r.atlas, CocycleLevel::Strong, opts(20, 99)).passed());
  EXPECT_TRUE(check_index_condition(r.atlas, opts(20, 99)).passed());
}

TEST(Shrinking, ForcedOverlapExhausts) {
  try {
    find_tame_shrinking(parse_atlas(fixtures::tame_exhaustion()), opts(), 4);
    FAIL() << "expected exhaustion";
  } catch (const RefineError& e) {
    EXPECT_EQ(e.kind(), RefineError::Kind::Exhaustion);
    EXPECT_FALSE(e.witnesses().empty());
  }
}

TEST(Reduction, ChangeFixtureFlagAndTop) {
  Atlas t = find_tame_shrinking(parse_atlas(fixtures::ex_change()), opts()).atlas;
  for (auto style : {ReductionStyle::Flag, ReductionStyle::Top}) {
    ReductionOptions ro;
    ro.check = opts();
    ro.style = style;
    ReductionContext ctx = build_reduction(t, ro);
    build_nested(ctx, opts());
    EXPECT_EQ(ctx.V.at({1}).size(), style == ReductionStyle::Flag ? 3u : 1u);
    EXPECT_EQ(ctx.V.at({1, 2}).size(), 2u);
    EXPECT_TRUE(ctx.V.at({2}).empty());
    auto v = check_reduction(ctx, opts());
    EXPECT_TRUE(v.passed()) << verdict_json(v).dump(2);
    auto l = check_level_sets(ctx, opts());
    EXPECT_TRUE(l.passed()) << verdict_json(l).dump(2);
    EXPECT_LE(ctx.delta_V, 0.25);
    EXPECT_LT(ctx.delta, ctx.delta_V);
  }
}

TEST(Reduction, CoreOfInclusion) {
  Atlas t = find_tame_shrinking(parse_atlas(fixtures::ex_change()), opts()).atlas;
  ReductionOptions ro;
  ro.check = opts();
  ReductionContext ctx = build_reduction(t, ro);
  build_nested(ctx, opts());
  Vec on(2), off(2);
  on << 1.0, 0.0;
  off << 1.0, 0.5;
  EXPECT_TRUE(ctx.in_core(1, {1, 2}, {1}, on));
  EXPECT_FALSE(ctx.in_core(1, {1, 2}, {1}, off));
  EXPECT_NEAR(ctx.core_distance(1, {1, 2}, {1}, off), 0.5, 1e-12);
  EXPECT_TRUE(ctx.in_C_tilde({1}, Vec::Constant(1, 1.0)));
  EXPECT_TRUE(std::isinf(ctx.core_distance(1, {1, 2}, {2}, on)));
}

TEST(Reduction, SerializationRoundTrip) {
  ReductionContext ctx = linear_context();
  ctx.sigma = 0.25;
  ctx.norms.scale = 2.0;
  ReductionContext back = reduction_from_json(*ctx.atlas, ctx.to_json());
  EXPECT_EQ(back.to_json().dump(), ctx.to_json().dump());
}
