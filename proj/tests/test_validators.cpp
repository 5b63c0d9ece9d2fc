#include "kuranishi/fixtures.hpp"
#include "kuranishi/validators.hpp"

#include <gtest/gtest.h>

using namespace kuranishi;

namespace {

Atlas load(const char* name) { return parse_atlas(fixtures::by_name(name)); }

CheckOptions opts(int density = 20, std::uint64_t seed = 7) {
  CheckOptions o;
  o.density = density;
  o.seed = seed;
  return o;
}

bool has_witness_in(const Verdict& v, const IndexSet& I) {
  for (const auto& w : v.witnesses)
    if (!w.charts.empty() && w.charts[0] == I && w.points.size() == 2) return true;
  return false;
}

}  // namespace

TEST(Cocycle, ChangeFixtureHasNoTriples) {
  auto v = check_cocycle(load("ex_change"), CocycleLevel::Strong, opts());
  EXPECT_TRUE(v.passed());
  EXPECT_EQ(v.details["triples"], 0);
}

TEST(Cocycle, AdditiveCircleIsWeakCocycle) {
  auto v = check_cocycle(load("ku30_additive"), CocycleLevel::Weak, opts());
  EXPECT_TRUE(v.passed()) << verdict_json(v).dump(2);
  EXPECT_TRUE(v.details["exact"].get<bool>());
}

TEST(Cocycle, OffsetTransitionFails) {
  Json doc = fixtures::bump_warp();
  for (auto& c : doc["changes"])
    if (c["source"] == Json::array({1}) && c["target"] == Json::array({1, 2, 3})) c["phi"] = Json::array({"x1 + 1/1000"});
  // the offset map leaves U_123 near its right end, so shrink its domain to keep it a valid change
  for (auto& c : doc["changes"])
    if (c["source"] == Json::array({1}) && c["target"] == Json::array({1, 2, 3}))
      c["domain"] = Json::parse(R"([{"box": [[1, "1999/1000"]]}])");
  auto v = check_cocycle(parse_atlas(doc), CocycleLevel::Weak, opts());
  ASSERT_EQ(v.status, Status::Fail);
  ASSERT_FALSE(v.witnesses.empty());
  EXPECT_EQ(v.witnesses[0].points.size(), 1u);
}

TEST(Cocycle, BumpResidualBelowTolerance) {
  auto v = check_cocycle(load("bump_warp"), CocycleLevel::Strong, opts());
  EXPECT_TRUE(v.passed()) << verdict_json(v).dump(2);
  EXPECT_FALSE(v.details["exact"].get<bool>());
  EXPECT_LT(std::stod(v.details["residual"].dump()), 1e-9);
}

TEST(Intertwining, FixturesIntertwine) {
  for (const char* n : {"ex_change", "ex_nonlin", "ku30_additive", "ku30_nonadditive", "index_fail", "tame_exhaustion",
                        "bump_warp"})
    EXPECT_TRUE(check_intertwining(load(n), opts()).passed()) << n;
}

TEST(IndexCondition, ChangeFixturePassesIncludingOrigin) {
  auto v = check_index_condition(load("ex_change"), opts());
  EXPECT_TRUE(v.passed()) << verdict_json(v).dump(2);
  EXPECT_GT(v.margin, 0.0);
}

TEST(IndexCondition, DegenerateSectionFailsAtOrigin) {
  auto v = check_index_condition(load("index_fail"), opts());
  ASSERT_EQ(v.status, Status::Fail);
  EXPECT_NEAR(v.witnesses[0].points[0][0], 0.0, 1e-9);
}

TEST(Additivity, NonAdditiveFixtureFails) {
  auto a = load("ku30_nonadditive");
  EXPECT_EQ(check_additivity(a).status, Status::Fail);
  EXPECT_TRUE(check_filtration(a).passed());
}

TEST(Additivity, AdditiveFixturesPass) {
  for (const char* n : {"ex_change", "ku30_additive", "bump_warp", "quartic"}) EXPECT_TRUE(check_additivity(load(n)).passed()) << n;
  EXPECT_EQ(check_additivity(load("ex_nonlin")).status, Status::Fail);
}

TEST(Additivity, InvariantUnderRelabeling) {
  // swap labels 1 and 2 everywhere in the change fixture
  Json doc = fixtures::ex_change();
  for (auto& c : doc["charts"]) {
    for (auto& x : c["index"]) x = 3 - x.get<int>();
    std::sort(c["index"].begin(), c["index"].end());
    if (c.contains("metric") && c["metric"].is_object()) {
      for (auto& x : c["metric"]["pullback"]) x = 3 - x.get<int>();
      std::sort(c["metric"]["pullback"].begin(), c["metric"]["pullback"].end());
    }
  }
  for (auto& c : doc["changes"]) {
    for (auto& x : c["source"]) x = 3 - x.get<int>();
    for (auto& x : c["target"]) x = 3 - x.get<int>();
    std::sort(c["target"].begin(), c["target"].end());
  }
  for (auto& I : doc["index_sets"]) {
    for (auto& x : I) x = 3 - x.get<int>();
    std::sort(I.begin(), I.end());
  }
  EXPECT_EQ(check_additivity(parse_atlas(doc)).status, check_additivity(load("ex_change")).status);
}

TEST(Tameness, ChangeFixtureIsTame) {
  auto v = check_tameness(load("ex_change"), opts());
  EXPECT_TRUE(v.passed()) << verdict_json(v).dump(2);
}

TEST(Tameness, BumpFixtureIsTame) {
  auto v = check_tameness(load("bump_warp"), opts());
  EXPECT_TRUE(v.passed()) << verdict_json(v).dump(2);
}

TEST(Tameness, MissingTripleChartFails) {
  auto v = check_tameness(load("tame_exhaustion"), opts());
  EXPECT_EQ(v.status, Status::Fail);
  EXPECT_EQ(v.details["tame1"], "fail");
}

TEST(Tameness, NonAdditiveIsNotTame) { EXPECT_EQ(check_tameness(load("ku30_nonadditive"), opts()).status, Status::Fail); }

TEST(Tameness, OmittedZeroBreaksTame2) {
  Json doc = fixtures::ex_change();
  doc["changes"][0]["domain"] = Json::parse(R"([{"box": [["-1/2", 2]]}])");
  auto v = check_tameness(parse_atlas(doc), opts());
  EXPECT_EQ(v.details["tame2"], "fail") << verdict_json(v).dump(2);
}

TEST(Injectivity, CircleFixturesFailWithTwoPointWitness) {
  for (const auto& [name, chart] : std::vector<std::pair<const char*, IndexSet>>{{"ex_nonlin", {3}}, {"ku30_additive", {3, 4}}}) {
    Atlas a = load(name);
    CloudOptions co;
    co.density = 20;
    auto v = check_injectivity_hausdorff(a, build_cloud(a, co), opts());
    EXPECT_EQ(v.status, Status::Fail) << name;
    EXPECT_TRUE(has_witness_in(v, chart)) << verdict_json(v).dump(2);
  }
}

TEST(Injectivity, TameFixturePasses) {
  Atlas a = load("ex_change");
  CloudOptions co;
  auto v = check_injectivity_hausdorff(a, build_cloud(a, co), opts());
  EXPECT_TRUE(v.passed()) << verdict_json(v).dump(2);
  EXPECT_EQ(v.details["zero_classes"], 3);
}

TEST(Metric, InclusionIsIsometry) { EXPECT_TRUE(check_metric_admissibility(load("ex_change"), opts()).passed()); }

TEST(Metric, StretchWitnessIsTwo) {
  auto v = check_metric_admissibility(load("stretch"), opts());
  ASSERT_EQ(v.status, Status::Fail);
  EXPECT_NEAR(v.witnesses[0].margins[0], 2.0, 1e-12);
}

TEST(SumConditions, DependentImagesFail) {
  EXPECT_EQ(check_sum_conditions(load("dependent_sum"), opts()).status, Status::Fail);
  EXPECT_TRUE(check_sum_conditions(load("ex_change"), opts()).passed());
  EXPECT_TRUE(check_sum_conditions(load("quartic"), opts()).passed());
}

TEST(Validate, SingleChartPassesEverything) {
  for (const auto& v : validate_atlas(load("identity"), opts())) EXPECT_TRUE(v.passed()) << v.check;
}
