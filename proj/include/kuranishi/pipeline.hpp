#pragma once

#include "kuranishi/generator.hpp"
#include "kuranishi/vfc.hpp"

#include <optional>
#include <string>

namespace kuranishi {

enum class Stage { Validate, Tame, Reduce, Perturb, Vfc, Invariance, Generate, Oracle };
const char* stage_name(Stage s);
Stage parse_stage(const std::string& s);

struct PipelineConfig {
  Stage stage = Stage::Validate;
  // Atlas document path, built-in fixture name, or generator name (generator document
  // path or name for generate / oracle).
  std::string input;
  int density = 20;
  std::uint64_t seed = 1;
  Tolerances tol;
  double delta = 0.0;  // > 0 overrides the computed delta
  double sigma = 0.0;  // > 0 overrides the certified sigma bound (must not exceed it)
  ReductionStyle style = ReductionStyle::Flag;
  double norm_scale = 1.0;
  int jobs = 0;
  std::string report_path, plot_path, out_path;

  CheckOptions check() const;
  Json to_json() const;
};

struct PipelineResult {
  Json report;
  std::optional<Json> plot;
  std::optional<Json> artifact;  // shrunk or generated atlas document
  bool passed = false;
  std::string first_failure;
};

// Runs the requested stage and every prerequisite stage; stops at the first failing verdict.
PipelineResult run_pipeline(const PipelineConfig& cfg);

}  // namespace kuranishi
