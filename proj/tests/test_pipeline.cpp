#include "kuranishi/pipeline.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace kuranishi;

namespace {

PipelineConfig config(Stage s, const std::string& input) {
  PipelineConfig c;
  c.stage = s;
  c.input = input;
  return c;
}

std::vector<std::string> stages(const PipelineResult& r) {
  std::vector<std::string> out;
  for (const auto& s : r.report["stages"]) out.push_back(s["stage"].get<std::string>());
  return out;
}

}  // namespace

TEST(Pipeline, VfcRunsEveryPrerequisite) {
  PipelineResult r = run_pipeline(config(Stage::Vfc, "planar"));
  EXPECT_TRUE(r.passed) << r.report.dump(2);
  EXPECT_EQ(stages(r), (std::vector<std::string>{"validate", "tame", "reduce", "perturb", "vfc"}));
  EXPECT_EQ(r.report["count"].get<int>(), 2);
  EXPECT_EQ(r.report["stages"][4]["verdicts"][1]["check"], "oracle_agreement");
  ASSERT_TRUE(r.plot.has_value());
  EXPECT_TRUE(r.plot->contains("zero_classes"));
}

TEST(Pipeline, StopsAtFirstFailure) {
  PipelineResult r = run_pipeline(config(Stage::Vfc, "ex_nonlin"));
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.first_failure, "injectivity_hausdorff");
  EXPECT_EQ(stages(r), std::vector<std::string>{"validate"});
  EXPECT_EQ(r.report["status"], "fail");
}

TEST(Pipeline, ErrorsBecomeFailingVerdicts) {
  PipelineResult r = run_pipeline(config(Stage::Tame, "tame_exhaustion"));
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(r.first_failure.empty());
  PipelineResult missing = run_pipeline(config(Stage::Validate, "/nonexistent/atlas.json"));
  EXPECT_EQ(missing.first_failure, "load_error");
}

TEST(Pipeline, SigmaOverrideAboveBoundFails) {
  PipelineConfig c = config(Stage::Reduce, "ex_change");
  c.sigma = 10.0;
  PipelineResult r = run_pipeline(c);
  EXPECT_EQ(r.first_failure, "sigma");
  c.sigma = 1e-4;
  EXPECT_TRUE(run_pipeline(c).passed);
}

TEST(Pipeline, ConfigIsRecorded) {
  PipelineConfig c = config(Stage::Validate, "ex_change");
  c.seed = 17;
  c.tol.eq = 1e-10;
  c.delta = 0.05;
  PipelineResult r = run_pipeline(c);
  const Json& cfg = r.report["config"];
  EXPECT_EQ(cfg["seed"].get<std::uint64_t>(), 17u);
  EXPECT_EQ(cfg["tolerances"]["eq"].get<double>(), 1e-10);
  EXPECT_EQ(cfg["delta"].get<double>(), 0.05);
  EXPECT_EQ(cfg["sigma"], "certified");
}

TEST(Pipeline, GeneratedArtifactParsesBack) {
  PipelineResult r = run_pipeline(config(Stage::Generate, "three_chart"));
  ASSERT_TRUE(r.passed) << r.report.dump(2);
  ASSERT_TRUE(r.artifact.has_value());
  auto path = std::filesystem::temp_directory_path() / "kuranishi_three_chart.json";
  write_json_file(path.string(), *r.artifact);
  PipelineResult v = run_pipeline(config(Stage::Vfc, path.string()));
  EXPECT_TRUE(v.passed) << v.report.dump(2);
  EXPECT_EQ(v.report["count"].get<int>(), 1);
  std::filesystem::remove(path);
}

TEST(Pipeline, Replays) {
  for (Stage s : {Stage::Perturb, Stage::Oracle}) {
    PipelineConfig c = config(s, s == Stage::Oracle ? "cubic" : "ex_change");
    EXPECT_EQ(run_pipeline(c).report.dump(), run_pipeline(c).report.dump());
  }
}

TEST(Pipeline, StageNamesRoundTrip) {
  for (Stage s : {Stage::Validate, Stage::Tame, Stage::Reduce, Stage::Perturb, Stage::Vfc, Stage::Invariance,
                  Stage::Generate, Stage::Oracle})
    EXPECT_EQ(parse_stage(stage_name(s)), s);
  EXPECT_THROW(parse_stage("count"), AtlasError);
}
