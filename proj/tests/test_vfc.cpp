#include "kuranishi/fixtures.hpp"
#include "kuranishi/vfc.hpp"

#include <gtest/gtest.h>

using namespace kuranishi;

namespace {

CheckOptions opts(int density = 20, std::uint64_t seed = 9) {
  CheckOptions o;
  o.density = density;
  o.seed = seed;
  return o;
}

Atlas tame(const Json& j) { return find_tame_shrinking(parse_atlas(j), opts()).atlas; }

int count(const Atlas& t, std::uint64_t seed = 1, ReductionStyle style = ReductionStyle::Flag) {
  ReductionContext ctx = reduce_for_count(t, style, 1.0, opts());
  PerturbOptions po;
  po.check = opts();
  Perturbation p = build_adapted(ctx, seed, po);
  return vfc_count(ctx, p, opts()).count;
}

Box interval(double lo, double hi) { return Box({to_rational(lo)}, {to_rational(hi)}); }

}  // namespace

TEST(Orientation, SignsOfSimpleZeros) {
  Atlas id = parse_atlas(fixtures::single_chart({"x1"}, {{"-2", "2"}}));
  ZeroField zero(id);
  EXPECT_EQ(orientation_sign(id, zero, {1}, Vec::Zero(1)), 1);
  Atlas rev = id;
  RationalMatrix flip(1, 1);
  flip(0, 0) = -1;
  rev.orientation[{1}] = OrientationFrame{{1}, flip, RationalMatrix::identity(1), 1};
  EXPECT_EQ(orientation_sign(rev, zero, {1}, Vec::Zero(1)), -1);
  Atlas sq = parse_atlas(fixtures::single_chart({"x1^2 - 1"}, {{"-2", "2"}}));
  ZeroField zs(sq);
  EXPECT_EQ(orientation_sign(sq, zs, {1}, Vec::Constant(1, -1.0)), -1);
  EXPECT_EQ(orientation_sign(sq, zs, {1}, Vec::Constant(1, 1.0)), 1);
}

TEST(Orientation, StandardFramesAreConsistentOnChangeFixture) {
  Atlas a = tame(fixtures::ex_change());
  auto v = validate_orientation(a, opts());
  EXPECT_TRUE(v.passed()) << verdict_json(v).dump(2);
  EXPECT_GT(v.details["samples"].get<long>(), 0);
  EXPECT_TRUE(validate_orientation(reverse_orientation(a), opts()).passed());
  auto one = validate_orientation(reverse_orientation(a, {1, 2}), opts());
  EXPECT_FALSE(one.passed());
  EXPECT_FALSE(one.witnesses.empty());
}

TEST(Zeros, UnperturbedSquareMinusOne) {
  Atlas a = parse_atlas(fixtures::single_chart({"x1^2 - 1"}, {{"-2", "2"}}));
  ReductionContext ctx = make_context(a, {{{1}, {interval(-1.5, 1.5)}}}, {{{1}, {interval(-1.25, 1.25)}}}, opts());
  ZeroField zero(a);
  auto zs = find_perturbed_zeros(ctx, zero, opts());
  ASSERT_EQ(zs.size(), 2u);
  EXPECT_NEAR(zs[0].point[0], -1.0, 1e-12);
  EXPECT_NEAR(zs[1].point[0], 1.0, 1e-12);
  EXPECT_NEAR(zs[0].sigma_min, 2.0, 1e-6);
  EXPECT_EQ(zs[0].sign, -1);
  EXPECT_EQ(zs[1].sign, 1);
  EXPECT_EQ(vfc_count(ctx, zero, opts()).count, 0);
}

TEST(Zeros, IdentitySingleZero) {
  Atlas a = parse_atlas(fixtures::single_chart({"x1"}, {{"-2", "2"}}));
  ReductionContext ctx = make_context(a, {{{1}, {interval(-1, 1)}}}, {{{1}, {interval(-0.5, 0.5)}}}, opts());
  ZeroField zero(a);
  auto zs = find_perturbed_zeros(ctx, zero, opts());
  ASSERT_EQ(zs.size(), 1u);
  EXPECT_EQ(zs[0].point[0], 0.0);
}

TEST(Glue, DuplicateZeroIsAmbiguous) {
  Atlas a = parse_atlas(fixtures::single_chart({"x1"}, {{"-2", "2"}}));
  ReductionContext ctx = make_context(a, {{{1}, {interval(-1, 1)}}}, {{{1}, {interval(-0.5, 0.5)}}}, opts());
  ZeroField zero(a);
  auto zs = find_perturbed_zeros(ctx, zero, opts());
  zs.push_back(zs[0]);
  zs.back().point[0] += 1e-9;
  try {
    glue_zero_set(ctx, zs, opts());
    FAIL() << "expected ambiguity";
  } catch (const VfcError& e) {
    EXPECT_EQ(e.kind(), VfcError::Kind::Ambiguous);
  }
}

TEST(Glue, ChangeFixtureIdentifiesAcrossCharts) {
  Atlas t = tame(fixtures::ex_change());
  ReductionContext ctx = reduce_for_count(t, ReductionStyle::Flag, 1.0, opts());
  PerturbOptions po;
  po.check = opts();
  Perturbation p = build_adapted(ctx, 4, po);
  auto z = vfc_count(ctx, p, opts());
  EXPECT_EQ(z.count, 0);
  // the class through x = 1 has representatives in charts 1 and 12
  bool found = false;
  for (const auto& c : z.classes) {
    const auto& first = z.zeros[c.members.front()];
    if (first.chart == IndexSet{1} && std::abs(first.point[0] - 1.0) < 1e-3) {
      found = true;
      ASSERT_EQ(c.members.size(), 2u);
      EXPECT_EQ(z.zeros[c.members[1]].chart, (IndexSet{1, 2}));
      EXPECT_EQ(c.sign, 1);
    }
  }
  EXPECT_TRUE(found);
  EXPECT_GT(z.separation, 1e-7);
}

TEST(Count, SingleChartFixtures) {
  EXPECT_EQ(count(tame(fixtures::by_name("quartic"))), 0);
  EXPECT_EQ(count(tame(fixtures::by_name("identity"))), 1);
  EXPECT_EQ(count(tame(fixtures::by_name("planar"))), 2);
}

TEST(Count, GlobalReversalNegates) {
  Atlas t = tame(fixtures::by_name("planar"));
  EXPECT_EQ(count(reverse_orientation(t)), -2);
}

TEST(Count, SingleChartReversalIsRejected) {
  Atlas t = reverse_orientation(tame(fixtures::ex_change()), {1});
  try {
    count(t);
    FAIL() << "expected an orientation error";
  } catch (const VfcError& e) {
    EXPECT_EQ(e.kind(), VfcError::Kind::Orientation);
  }
}

TEST(Concordance, CutoffIsCollarConstant) {
  EXPECT_EQ(ConcordanceField::chi(0.0), 0.0);
  EXPECT_EQ(ConcordanceField::chi(0.3), 0.0);
  EXPECT_EQ(ConcordanceField::chi(0.7), 1.0);
  EXPECT_EQ(ConcordanceField::chi(1.0), 1.0);
  double prev = 0.0;
  for (double t = 0.0; t <= 1.0; t += 0.01) {
    EXPECT_GE(ConcordanceField::chi(t), prev);
    prev = ConcordanceField::chi(t);
  }
}

TEST(Invariance, IdentityAcrossSeedsReductionsScalings) {
  InvarianceOptions io;
  io.check = opts();
  auto v = invariance_check(tame(fixtures::by_name("identity")), io);
  EXPECT_TRUE(v.passed()) << verdict_json(v).dump(2);
  EXPECT_EQ(v.details["count"].get<int>(), 1);
  EXPECT_EQ(v.details["runs"].size(), 12u);
  EXPECT_EQ(v.details["concordance"]["t0"].get<int>(), 1);
  EXPECT_EQ(v.details["concordance"]["t1"].get<int>(), 1);
}

TEST(Invariance, ChangeFixture) {
  InvarianceOptions io;
  io.check = opts();
  io.norm_scales = {1.0};
  auto v = invariance_check(tame(fixtures::ex_change()), io);
  EXPECT_TRUE(v.passed()) << verdict_json(v).dump(2);
  EXPECT_EQ(v.details["count"].get<int>(), 0);
}

TEST(Invariance, OversizedOffsetMissesTheZero) {
  InvarianceOptions io;
  io.check = opts();
  io.styles = {ReductionStyle::Flag};
  io.norm_scales = {1.0};
  io.tamper = [](Perturbation& p, std::size_t run) {
    if (run == 1) p.charts.at({1}).bumps.push_back({Vec::Zero(1), 10.0, Vec::Constant(1, 0.5)});
  };
  auto v = invariance_check(tame(fixtures::by_name("identity")), io);
  EXPECT_FALSE(v.passed());
  EXPECT_EQ(v.details["runs"][1]["count"].get<int>(), 0);
  EXPECT_TRUE(v.details["runs"][1].contains("perturbation"));
}
