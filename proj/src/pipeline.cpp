#include "kuranishi/pipeline.hpp"

#include "kuranishi/fixtures.hpp"

#include <algorithm>
#include <filesystem>

namespace kuranishi {

namespace {

constexpr const char* kStageNames[] = {"validate", "tame", "reduce", "perturb", "vfc", "invariance", "generate", "oracle"};

struct Input {
  Atlas atlas;
  std::optional<GlobalProblem> problem;
  std::string source;
};

bool is_one_of(const std::string& s, const std::vector<std::string>& names) {
  return std::find(names.begin(), names.end(), s) != names.end();
}

// Bare names resolve to generators before fixtures; "fixture:NAME" forces a fixture.
Input load_atlas_input(const std::string& in) {
  Input r;
  const std::string prefix = "fixture:";
  if (std::filesystem::exists(in)) {
    Json doc = read_json_file(in);
    r.atlas = parse_atlas(doc);
    if (doc.contains("problem")) r.problem = GlobalProblem::from_json(doc.at("problem"));
    r.source = "file";
  } else if (is_one_of(in, generator_names())) {
    GeneratedAtlas g = generate(in);
    r.atlas = std::move(g.atlas);
    r.problem = std::move(g.problem);
    r.source = "generator";
  } else if (is_one_of(in, fixtures::names()) || (in.rfind(prefix, 0) == 0 && is_one_of(in.substr(prefix.size()), fixtures::names()))) {
    r.atlas = parse_atlas(fixtures::by_name(in.rfind(prefix, 0) == 0 ? in.substr(prefix.size()) : in));
    r.source = "fixture";
  } else {
    throw AtlasError(AtlasError::Kind::Schema, "input '" + in + "' is neither a file, a generator nor a fixture name");
  }
  return r;
}

Json load_generator_document(const std::string& in) {
  if (std::filesystem::exists(in)) return read_json_file(in);
  if (is_one_of(in, generator_names())) return generator_document(in);
  throw AtlasError(AtlasError::Kind::Schema, "input '" + in + "' is neither a file nor a generator name");
}

Json boxes_json(const std::vector<Box>& bs) {
  Json a = Json::array();
  for (const auto& b : bs) {
    Json row = Json::array();
    for (int k = 0; k < b.dim(); ++k) row.push_back({number_json(b.lo_d[k]), number_json(b.hi_d[k])});
    a.push_back(row);
  }
  return a;
}

class Runner {
 public:
  explicit Runner(const PipelineConfig& cfg) : cfg_(cfg), opt_(cfg.check()) {}

  PipelineResult run() {
    set_jobs(cfg_.jobs);
    report_["config"] = cfg_.to_json();
    report_["stages"] = Json::array();
    try {
      dispatch();
    } catch (const std::exception& e) {
      Verdict v;
      v.check = current_ + "_error";
      v.fail({{}, {}, {}, e.what()});
      record(current_, {v});
    }
    res_.passed = res_.first_failure.empty();
    report_["status"] = res_.passed ? "pass" : "fail";
    if (!res_.passed) report_["first_failure"] = res_.first_failure;
    res_.report = std::move(report_);
    if (!plot_.empty()) res_.plot = std::move(plot_);
    return std::move(res_);
  }

 private:
  // false when a verdict failed and the pipeline must stop
  bool record(const std::string& stage, const std::vector<Verdict>& vs, Json result = nullptr) {
    Json s;
    s["stage"] = stage;
    s["verdicts"] = Json::array();
    for (const auto& v : vs) {
      s["verdicts"].push_back(verdict_json(v));
      if (!v.passed() && res_.first_failure.empty()) res_.first_failure = v.check;
    }
    if (!result.is_null()) s["result"] = std::move(result);
    report_["stages"].push_back(std::move(s));
    return res_.first_failure.empty();
  }

  void dispatch() {
    switch (cfg_.stage) {
      case Stage::Generate: return generate_stage();
      case Stage::Oracle: return oracle_stage();
      default: break;
    }
    current_ = "load";
    input_ = load_atlas_input(cfg_.input);
    report_["input"] = {{"source", input_.source}, {"charts", input_.atlas.index_sets.size()}};
    if (!validate()) return;
    if (cfg_.stage == Stage::Validate) return;
    if (!tame()) return;
    if (cfg_.stage == Stage::Tame) return;
    if (cfg_.stage == Stage::Invariance) return invariance();
    if (!reduce()) return;
    if (cfg_.stage == Stage::Reduce) return;
    if (!perturb()) return;
    if (cfg_.stage == Stage::Perturb) return;
    count();
  }

  bool validate() {
    current_ = "validate";
    return record(current_, validate_atlas(input_.atlas, opt_));
  }

  bool tame() {
    current_ = "tame";
    ShrinkResult sr = find_tame_shrinking(input_.atlas, opt_);
    tame_ = sr.atlas;
    CloudOptions co;
    co.density = cfg_.density;
    co.seed = cfg_.seed;
    co.tol = cfg_.tol;
    check_footprints_preserved(input_.atlas, tame_, co);
    Json r;
    r["margin"] = rational_string(sr.margin);
    r["iterations"] = sr.iterations;
    res_.artifact = atlas_json(tame_);
    plot_["domains"] = Json::array();
    for (const auto& I : tame_.index_sets) {
      Json d;
      d["chart"] = to_string(I);
      std::vector<Box> bs;
      for (const auto& pc : tame_.chart(I).domain.pieces()) bs.push_back(pc.box);
      d["boxes"] = boxes_json(bs);
      plot_["domains"].push_back(d);
    }
    return record(current_, {sr.tameness, check_cocycle(tame_, CocycleLevel::Strong, opt_)}, r);
  }

  bool reduce() {
    current_ = "reduce";
    ReductionOptions ro;
    ro.check = opt_;
    ro.style = cfg_.style;
    ctx_ = build_reduction(tame_, ro);
    build_nested(*ctx_, opt_, cfg_.delta);
    ctx_->norms.scale = cfg_.norm_scale;
    ctx_->sigma_bound = compute_sigma(*ctx_, opt_);
    ctx_->sigma = ctx_->sigma_bound.value;
    Verdict sig;
    sig.check = "sigma";
    sig.observe(ctx_->sigma_bound.value);
    if (cfg_.sigma > 0.0) {
      sig.details["override"] = number_json(cfg_.sigma);
      if (cfg_.sigma > ctx_->sigma_bound.value)
        sig.fail({{}, {}, {ctx_->sigma_bound.value}, "sigma override exceeds the certified bound"});
      else
        ctx_->sigma = cfg_.sigma;
    }
    plot_["V"] = Json::array();
    for (const auto& [J, bs] : ctx_->V) plot_["V"].push_back({{"chart", to_string(J)}, {"boxes", boxes_json(bs)}});
    plot_["C"] = Json::array();
    for (const auto& [J, bs] : ctx_->C) plot_["C"].push_back({{"chart", to_string(J)}, {"boxes", boxes_json(bs)}});
    return record(current_, {check_reduction(*ctx_, opt_), check_level_sets(*ctx_, opt_), sig}, ctx_->to_json());
  }

  bool perturb() {
    current_ = "perturb";
    PerturbOptions po;
    po.check = opt_;
    nu_ = build_adapted(*ctx_, cfg_.seed, po);
    CheckOptions fresh = opt_;
    fresh.seed = mix64(cfg_.seed ^ 0xf4e5);
    Verdict v = verify_adapted(*nu_, fresh);
    // magnitude field on each V^1_J
    plot_["nu"] = Json::array();
    for (const auto& [J, bs] : ctx_->V)
      for (const auto& b : bs)
        for (const auto& x : sample_box(b.expanded(ctx_->radius(1.0)), std::max(4, cfg_.density / 2), 0, 0.0)) {
          if (!tame_.chart(J).domain.contains(x)) continue;
          plot_["nu"].push_back({{"chart", to_string(J)}, {"x", vec_json(x)}, {"norm", number_json(ctx_->norm(J, nu_->eval(J, x)))}});
        }
    return record(current_, {v}, nu_->to_json());
  }

  void count() {
    current_ = "vfc";
    OrientedZeroSet z = vfc_count(*ctx_, *nu_, opt_);
    Verdict v;
    v.check = "vfc";
    v.observe(z.separation);
    v.details["count"] = z.count;
    std::vector<Verdict> vs{v};
    if (input_.problem) {
      OracleResult o = brute_force_degree(*input_.problem);
      Verdict agree;
      agree.check = "oracle_agreement";
      agree.details = {{"count", z.count}, {"oracle", o.degree}};
      if (o.degree != z.count) agree.fail({{}, {}, {}, "count differs from the brute-force degree"});
      vs.push_back(agree);
    }
    Json r = z.to_json();
    plot_["zero_classes"] = r.value("classes", Json::array());
    record(current_, vs, std::move(r));
    report_["count"] = z.count;
  }

  void invariance() {
    current_ = "invariance";
    InvarianceOptions io;
    io.check = opt_;
    io.seeds = {cfg_.seed, cfg_.seed + 1, cfg_.seed + 2};
    io.norm_scales = {cfg_.norm_scale, 2.0 * cfg_.norm_scale};
    Verdict v = invariance_check(tame_, io);
    if (v.details.contains("count")) report_["count"] = v.details["count"];
    record(current_, {v});
  }

  void generate_stage() {
    current_ = "generate";
    GeneratorTolerances gt;
    gt.fit = cfg_.tol.fit;
    gt.rank = cfg_.tol.rank;
    GeneratedAtlas g = generate_from(load_generator_document(cfg_.input), gt);
    Json doc = atlas_json(g.atlas);
    doc["problem"] = g.problem.to_json();
    Json charts = Json::array();
    for (const auto& c : g.charts)
      charts.push_back({{"index", to_string(c.chart.index)},
                        {"free", c.free},
                        {"fit_residual", number_json(c.fit_residual)},
                        {"orientation", c.orientation}});
    res_.artifact = doc;
    record(current_, validate_atlas(g.atlas, opt_), {{"charts", charts}});
  }

  void oracle_stage() {
    current_ = "oracle";
    GlobalProblem p = GlobalProblem::from_json(load_generator_document(cfg_.input));
    OracleResult o = brute_force_degree(p);
    Verdict v;
    v.check = "oracle";
    v.observe(o.boundary_margin);
    Json r = {{"degree", o.degree}, {"resolution", o.resolution}, {"boundary_margin", number_json(o.boundary_margin)}};
    if (!o.roots.empty()) {
      r["roots"] = Json::array();
      for (const auto& x : o.roots) r["roots"].push_back(vec_json(x));
    }
    record(current_, {v}, r);
    report_["count"] = o.degree;
  }

  const PipelineConfig& cfg_;
  CheckOptions opt_;
  Json report_ = Json::object();
  Json plot_ = Json::object();
  PipelineResult res_;
  std::string current_ = "setup";
  Input input_;
  Atlas tame_;
  std::optional<ReductionContext> ctx_;
  std::optional<Perturbation> nu_;
};

}  // namespace

const char* stage_name(Stage s) { return kStageNames[static_cast<int>(s)]; }

Stage parse_stage(const std::string& s) {
  for (int i = 0; i < 8; ++i)
    if (s == kStageNames[i]) return static_cast<Stage>(i);
  throw AtlasError(AtlasError::Kind::Schema, "unknown stage '" + s + "'");
}

CheckOptions PipelineConfig::check() const {
  CheckOptions o;
  o.density = density;
  o.seed = seed;
  o.tol = tol;
  return o;
}

Json PipelineConfig::to_json() const {
  Json j;
  j["stage"] = stage_name(stage);
  j["input"] = input;
  j["density"] = density;
  j["seed"] = seed;
  j["tolerances"] = {{"rank", number_json(tol.rank)},     {"eq", number_json(tol.eq)},
                     {"id", number_json(tol.id)},         {"transv", number_json(tol.transv)},
                     {"fit", number_json(tol.fit)}};
  j["delta"] = delta > 0.0 ? number_json(delta) : Json("computed");
  j["sigma"] = sigma > 0.0 ? number_json(sigma) : Json("certified");
  j["reduction"] = reduction_style_name(style);
  j["norm_scale"] = number_json(norm_scale);
  j["jobs"] = jobs;
  return j;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) { return Runner(cfg).run(); }

}  // namespace kuranishi
