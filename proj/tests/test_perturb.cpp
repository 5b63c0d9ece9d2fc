#include "kuranishi/fixtures.hpp"
#include "kuranishi/perturb.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace kuranishi;

namespace {

CheckOptions opts(int density = 20, std::uint64_t seed = 5) {
  CheckOptions o;
  o.density = density;
  o.seed = seed;
  return o;
}

ReductionContext reduced(const Atlas& atlas, ReductionStyle style = ReductionStyle::Flag) {
  Atlas t = find_tame_shrinking(atlas, opts()).atlas;
  ReductionOptions ro;
  ro.check = opts();
  ro.style = style;
  ReductionContext ctx = build_reduction(t, ro);
  build_nested(ctx, opts());
  ctx.sigma_bound = compute_sigma(ctx, opts());
  ctx.sigma = ctx.sigma_bound.value;
  return ctx;
}

PerturbOptions popts() {
  PerturbOptions o;
  o.check = opts();
  return o;
}

double sup_norm(const Perturbation& p) {
  double s = 0.0;
  for (const auto& [J, vs] : p.ctx->V)
    for (const auto& b : vs)
      for (const auto& x : sample_box(b.expanded(p.ctx->radius(static_cast<double>(J.size()))), 40, 1))
        if (p.ctx->atlas->chart(J).domain.contains(x)) s = std::max(s, p.ctx->norm(J, p.eval(J, x)));
  return s;
}

}  // namespace

TEST(Perturb, TransverseSingleChartNeedsNoBumps) {
  ReductionContext ctx = reduced(parse_atlas(fixtures::single_chart({"x1"}, {{"-2", "2"}})));
  Perturbation p = build_adapted(ctx, 1, popts());
  EXPECT_TRUE(p.charts.at({1}).bumps.empty());
  EXPECT_EQ(p.eval({1}, Vec::Constant(1, 0.01)).norm(), 0.0);
  auto v = verify_adapted(p, opts());
  EXPECT_TRUE(v.passed()) << verdict_json(v).dump(2);
}

TEST(Perturb, SquareGetsZeroOrTwoSimpleRoots) {
  ReductionContext ctx = reduced(parse_atlas(fixtures::single_chart({"x1^2"}, {{"-2", "2"}})));
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    Perturbation p = build_adapted(ctx, seed, popts());
    EXPECT_EQ(p.charts.at({1}).bumps.size(), 1u);
    auto zs = chart_zeros(ctx, p, {1}, -1, 20);
    EXPECT_TRUE(zs.size() == 0 || zs.size() == 2) << zs.size();
    for (const auto& z : zs) EXPECT_GT(z.sigma_min, 1e-6);
    auto v = verify_adapted(p, opts());
    EXPECT_TRUE(v.passed()) << verdict_json(v).dump(2);
    EXPECT_LT(sup_norm(p), ctx.sigma);
  }
}

TEST(Perturb, ChangeFixtureIsAdapted) {
  ReductionContext ctx = reduced(parse_atlas(fixtures::ex_change()));
  Perturbation p = build_adapted(ctx, 7, popts());
  const auto& c1 = p.charts.at({1});
  ASSERT_EQ(c1.bumps.size(), 1u);
  EXPECT_LT(std::abs(c1.bumps[0].center[0]), 1e-3);
  EXPECT_TRUE(p.charts.at({1, 2}).bumps.empty());
  EXPECT_TRUE(p.charts.at({2}).bumps.empty());
  auto v = verify_adapted(p, opts());
  EXPECT_TRUE(v.passed()) << verdict_json(v).dump(2);
  // nu_12(x, 0) = (nu_1(x), 0) on the core
  for (double x : {-0.01, 0.0, 0.005, 0.99, 1.0}) {
    Vec y = Vec::Constant(1, x), w(2);
    w << x, 0.0;
    auto mu = pushforward_mu(p, {1, 2}, w, 1.5);
    ASSERT_TRUE(mu.has_value());
    EXPECT_NEAR((*mu)[0], p.eval({1}, y)[0], 1e-15);
    EXPECT_EQ((*mu)[1], 0.0);
    EXPECT_NEAR((p.eval({1, 2}, w) - *mu).norm(), 0.0, 1e-15);
  }
}

TEST(Perturb, NoPrescriptionOnBasicCharts) {
  ReductionContext ctx = reduced(parse_atlas(fixtures::ex_change()));
  Perturbation p = build_adapted(ctx, 7, popts());
  EXPECT_FALSE(pushforward_mu(p, {1}, Vec::Constant(1, 0.0), 0.5).has_value());
  EXPECT_EQ(p.extension({1}, Vec::Constant(1, 0.0)).norm(), 0.0);
}

TEST(Perturb, SeedsGiveDistinctAdaptedPerturbations) {
  ReductionContext ctx = reduced(parse_atlas(fixtures::ex_change()));
  Perturbation a = build_adapted(ctx, 1, popts()), b = build_adapted(ctx, 2, popts()),
               a2 = build_adapted(ctx, 1, popts());
  EXPECT_TRUE(a.identical(a2));
  EXPECT_EQ(a.to_json().dump(), a2.to_json().dump());
  EXPECT_FALSE(a.identical(b));
  EXPECT_TRUE(verify_adapted(b, opts()).passed());
}

TEST(Perturb, ScheduleDoesNotMatter) {
  ReductionContext ctx = reduced(parse_atlas(fixtures::ex_change()));
  PerturbOptions s = popts(), q = popts();
  s.exec = Exec::Serial;
  q.exec = Exec::Parallel;
  EXPECT_TRUE(build_adapted(ctx, 3, s).identical(build_adapted(ctx, 3, q)));
}

TEST(Perturb, ScaledUpFailsSmallness) {
  ReductionContext ctx = reduced(parse_atlas(fixtures::ex_change()));
  Perturbation p = build_adapted(ctx, 7, popts());
  Perturbation big = p.scaled(10 * ctx.sigma / sup_norm(p));
  auto parts = verify_conditions(big, opts());
  for (const auto& v : parts)
    if (v.check == "smallness") EXPECT_FALSE(v.passed());
  EXPECT_FALSE(verify_adapted(big, opts()).passed());
}

TEST(Perturb, EditedCoreValueFailsAdmissibility) {
  ReductionContext ctx = reduced(parse_atlas(fixtures::ex_change()));
  Perturbation p = build_adapted(ctx, 7, popts());
  Vec c(2), k(2);
  c << 1.0, 0.0;
  k << 0.0, 0.1 * ctx.sigma;
  p.charts.at({1, 2}).bumps.push_back({c, ctx.eta(2), k});
  auto parts = verify_conditions(p, opts());
  bool seen = false;
  for (const auto& v : parts)
    if (v.check == "admissibility") {
      seen = true;
      EXPECT_FALSE(v.passed());
      ASSERT_FALSE(v.witnesses.empty());
      EXPECT_EQ(v.witnesses[0].charts[0], (IndexSet{1, 2}));
    }
  EXPECT_TRUE(seen);
}

TEST(Perturb, SerializationReplays) {
  ReductionContext ctx = reduced(parse_atlas(fixtures::ex_change()));
  Perturbation p = build_adapted(ctx, 11, popts());
  Perturbation back = perturbation_from_json(ctx, Json::parse(p.to_json().dump()));
  EXPECT_TRUE(back.identical(p));
  EXPECT_EQ(back.to_json().dump(), p.to_json().dump());
  Vec x = Vec::Constant(1, 0.003);
  EXPECT_EQ(back.eval({1}, x), p.eval({1}, x));
}

TEST(Perturb, MaxNormEqualsComponentMaximum) {
  ReductionContext ctx = reduced(parse_atlas(fixtures::ex_change()));
  Perturbation p = build_adapted(ctx, 7, popts());
  for (double x : {0.0, 0.01, 0.02}) {
    Vec w(2);
    w << x, 0.003;
    auto comp = p.components({1, 2}, w);
    double m = 0.0;
    for (std::size_t i = 0; i < comp.size(); ++i) m = std::max(m, ctx.norms.weight(i + 1) * comp[i].norm());
    EXPECT_DOUBLE_EQ(ctx.norm({1, 2}, p.eval({1, 2}, w)), ctx.norms.scale * m);
  }
}
