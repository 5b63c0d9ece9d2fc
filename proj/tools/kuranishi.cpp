#include "kuranishi/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using namespace kuranishi;

int main(int argc, char** argv) {
  CLI::App app{"Kuranishi atlas checker: validate, tame, reduce, perturb and count"};
  app.require_subcommand(1);

  PipelineConfig cfg;
  if (const char* s = std::getenv("KURANISHI_SEED")) cfg.seed = std::strtoull(s, nullptr, 10);
  std::string reduction = "flag";

  struct Cmd {
    Stage stage;
    const char* help;
  };
  const Cmd cmds[] = {
      {Stage::Validate, "Structural checks for the declared atlas kind"},
      {Stage::Tame, "Validate, then find a tame shrinking"},
      {Stage::Reduce, "... then build the nested reduction and the sigma bound"},
      {Stage::Perturb, "... then build and verify an adapted perturbation"},
      {Stage::Vfc, "... then glue the perturbed zero set and report the signed count"},
      {Stage::Invariance, "Counts across seeds, reductions and norm scalings, plus concordance slices"},
      {Stage::Generate, "Build an atlas from a global problem (generator name or document)"},
      {Stage::Oracle, "Brute-force degree of a global problem"},
  };
  for (const auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(stage_name(c.stage), c.help);
    sub->add_option("input", cfg.input, "atlas/problem document, fixture name or generator name")->required();
    sub->add_option("--density", cfg.density, "samples per axis")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "seed (default $KURANISHI_SEED or 1)");
    sub->add_option("--jobs", cfg.jobs, "worker threads (0 = OpenMP default)");
    sub->add_option("--tol-rank", cfg.tol.rank);
    sub->add_option("--tol-eq", cfg.tol.eq);
    sub->add_option("--tol-id", cfg.tol.id);
    sub->add_option("--tol-transv", cfg.tol.transv);
    sub->add_option("--tol-fit", cfg.tol.fit);
    sub->add_option("--delta", cfg.delta, "override the reduction constant delta");
    sub->add_option("--sigma", cfg.sigma, "use a smaller sigma than the certified bound");
    sub->add_option("--reduction", reduction, "flag | top")->check(CLI::IsMember({"flag", "top"}));
    sub->add_option("--norm-scale", cfg.norm_scale);
    sub->add_option("--report", cfg.report_path, "report path (default stdout)");
    sub->add_option("--plot", cfg.plot_path, "plot data path");
    sub->add_option("-o,--out", cfg.out_path, "tamed or generated atlas document");
    sub->callback([&cfg, stage = c.stage] { cfg.stage = stage; });
  }
  CLI11_PARSE(app, argc, argv);
  cfg.style = reduction == "top" ? ReductionStyle::Top : ReductionStyle::Flag;

  PipelineResult r = run_pipeline(cfg);
  try {
    if (cfg.report_path.empty())
      std::cout << r.report.dump(2) << "\n";
    else
      write_json_file(cfg.report_path, r.report);
    if (!cfg.plot_path.empty() && r.plot) write_json_file(cfg.plot_path, *r.plot);
    if (!cfg.out_path.empty() && r.artifact) write_json_file(cfg.out_path, *r.artifact);
  } catch (const std::exception& e) {
    std::cerr << "kuranishi: " << e.what() << "\n";
    return 2;
  }
  if (!r.passed) {
    std::cerr << "kuranishi: " << stage_name(cfg.stage) << " failed at '" << r.first_failure << "'\n";
    return 1;
  }
  return 0;
}
