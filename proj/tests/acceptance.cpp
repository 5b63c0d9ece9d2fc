// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include "kuranishi/fixtures.hpp"
#include "kuranishi/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace kuranishi;

namespace {

CheckOptions opts(int density = 20, std::uint64_t seed = 1) {
  CheckOptions o;
  o.density = density;
  o.seed = seed;
  return o;
}

class Log {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      failures_ << "    failed: " << what << "\n";
    }
  }
  // runs f, failing when it throws or exceeds the time limit
  void timed(const std::string& what, double limit_s, const std::function<void()>& f) {
    auto t0 = std::chrono::steady_clock::now();
    try {
      f();
    } catch (const std::exception& e) {
      check(false, what + ": " + e.what());
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream os;
    os.precision(3);
    os << what << " " << s << "s";
    notes_.push_back(os.str());
    check(s <= limit_s, what + " took " + std::to_string(s) + " s > " + std::to_string(limit_s) + " s");
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool passed() const { return pass_; }
  std::string failures() const { return failures_.str(); }
  std::string notes() const {
    std::string out;
    for (const auto& n : notes_) out += (out.empty() ? "" : "; ") + n;
    return out;
  }

 private:
  bool pass_ = true;
  std::ostringstream failures_;
  std::vector<std::string> notes_;
};

Atlas tame_of(const Atlas& a) { return find_tame_shrinking(a, opts()).atlas; }

int count_of(const Atlas& tame, std::uint64_t seed = 1) {
  ReductionContext ctx = reduce_for_count(tame, ReductionStyle::Flag, 1.0, opts());
  PerturbOptions po;
  po.check = opts();
  Perturbation p = build_adapted(ctx, seed, po);
  return vfc_count(ctx, p, opts()).count;
}

bool witness_in(const Verdict& v, const IndexSet& chart, std::size_t points) {
  for (const auto& w : v.witnesses)
    if (!w.charts.empty() && w.charts[0] == chart && w.points.size() == points) return true;
  return false;
}

// 1. fixture verdicts
void fixture_verdicts(Log& log) {
  log.timed("index(ex_change)", 10, [&] {
    Atlas a = parse_atlas(fixtures::ex_change());
    Verdict v = check_index_condition(a, opts());
    log.check(v.passed() && v.margin > 0.0, "ex_change index condition");
    // the degenerate zero of s_1 at u = 0 is probed explicitly
    log.check(a.change({1}, {1, 2}).contains(Vec::Zero(1)), "u = 0 lies in U_{1,12}");
  });
  for (const auto& [name, chart] : std::vector<std::pair<std::string, IndexSet>>{{"ex_nonlin", {3}}, {"ku30_additive", {3, 4}}})
    log.timed("injectivity(" + name + ")", 10, [&, name = name, chart = chart] {
      Atlas a = parse_atlas(fixtures::by_name(name));
      CloudOptions co;
      co.density = 20;
      Verdict v = check_injectivity_hausdorff(a, build_cloud(a, co), opts());
      log.check(!v.passed(), name + " injectivity should fail");
      log.check(witness_in(v, chart, 2), name + " two-point witness in U_" + to_string(chart));
    });
  log.timed("additivity(ku30_nonadditive)", 10, [&] {
    Atlas a = parse_atlas(fixtures::ku30_nonadditive());
    log.check(!check_additivity(a).passed(), "additivity should fail");
    log.check(check_filtration(a).passed(), "filtration identity should pass");
  });
}

// 2. tame => strong cocycle
void tame_strong(Log& log) {
  std::vector<std::pair<std::string, Atlas>> cases;
  for (const auto& n : fixtures::names()) {
    Atlas a = parse_atlas(fixtures::by_name(n));
    cases.emplace_back(n, a);
    try {
      cases.emplace_back(n + "/shrunk", tame_of(a));
    } catch (const std::exception&) {
    }
  }
  for (const auto& n : generator_names()) cases.emplace_back("generated " + n, tame_of(generate(n).atlas));
  int tame = 0;
  for (const auto& [name, a] : cases) {
    if (!check_tameness(a, opts()).passed()) continue;
    ++tame;
    Verdict v = check_cocycle(a, CocycleLevel::Strong, opts(20, 4242));
    const double r = v.details["residual"].get<double>();
    const bool exact = v.details["exact"].get<bool>();
    log.check(v.passed(), name + " strong cocycle");
    log.check(exact ? r == 0.0 : r < 1e-9, name + " residual " + std::to_string(r));
  }
  log.note(std::to_string(tame) + " tame atlases");
  log.check(tame >= 8, "too few tame atlases exercised");
}

// 3. constants
void constants(Log& log) {
  Box unit({Rational(0)}, {Rational(1)});
  Atlas wide = parse_atlas(fixtures::single_chart({"x1"}, {{"-1", "2"}}));
  double dv = compute_delta_V(wide, {{{1}, {unit}}}, opts()).delta_V;
  log.check(dv == 0.25, "delta_V = 0.25 exactly");

  Atlas lin = parse_atlas(fixtures::single_chart({"x1"}, {{"-2", "2"}}));
  ReductionContext ctx = make_context(lin, {{{1}, {Box({Rational(-1)}, {Rational(1)})}}},
                                      {{{1}, {Box({Rational(-1, 2)}, {Rational(1, 2)})}}}, opts());
  ReductionContext one = ctx;
  one.delta = 1.0;
  log.check(std::fabs(one.eta(0) - (1.0 - std::pow(2.0, -0.25))) <= 1e-12, "eta_0 at delta = 1");

  SigmaBound s = compute_sigma(ctx, opts());
  log.check(s.value <= 0.5 && s.value >= 0.5 - ctx.delta / 2 - s.slack && s.value > 0.0, "sigma in range");
  std::ostringstream os;
  os << "sigma=" << s.value << " delta=" << ctx.delta;
  log.note(os.str());
  for (double c : {0.5, 2.0, 10.0}) {
    ReductionContext scaled = ctx;
    scaled.norms.scale = c;
    log.check(compute_sigma(scaled, opts()).sampled_min == c * s.sampled_min, "homogeneity at c = " + std::to_string(c));
  }
}

// 4. adapted perturbation ledger
void adapted(Log& log) {
  std::vector<std::pair<std::string, std::function<Atlas()>>> cases{
      {"ex_change", [] { return parse_atlas(fixtures::ex_change()); }},
      {"three_chart", [] { return generate("three_chart").atlas; }}};
  for (const auto& [name, make] : cases)
    log.timed(name, 60, [&, name = name, make = make] {
      Atlas t = tame_of(make());
      ReductionContext ctx = reduce_for_count(t, ReductionStyle::Flag, 1.0, opts());
      PerturbOptions po;
      po.check = opts();
      Perturbation p = build_adapted(ctx, 1, po);
      Verdict v = verify_adapted(p, opts(20, 777));
      log.check(v.passed(), name + " verify_adapted: " + verdict_json(v).dump());
      double worst = std::numeric_limits<double>::infinity();
      std::size_t zeros = 0;
      for (const auto& z : find_perturbed_zeros(ctx, p, opts(20, 778))) {
        worst = std::min(worst, z.sigma_min);
        ++zeros;
      }
      log.check(zeros > 0 && worst > 1e-6, name + " sigma_min at zeros");
      std::ostringstream os;
      os << name << " zeros=" << zeros << " min sigma_min=" << worst;
      log.note(os.str());
    });
}

// 5. count vs oracle
void versus_oracle(Log& log) {
  for (const char* name : {"planar", "quartic", "identity", "cubic"})
    log.timed(name, 60, [&, name] {
      GeneratedAtlas g = generate(name);
      int oracle = brute_force_degree(g.problem).degree;
      int count = count_of(tame_of(g.atlas));
      log.check(count == oracle, std::string(name) + " count " + std::to_string(count) + " oracle " + std::to_string(oracle));
      log.note(std::string(name) + "=" + std::to_string(count));
    });
}

// 6. invariance
void invariance(Log& log) {
  for (const char* name : {"planar", "quartic", "identity", "cubic"}) {
    GeneratedAtlas g = generate(name);
    InvarianceOptions io;
    io.check = opts();
    Verdict v = invariance_check(tame_of(g.atlas), io);
    const Json& d = v.details;
    log.check(v.passed(), std::string(name) + " invariance: " + verdict_json(v).dump());
    log.check(d["runs"].size() == 12, std::string(name) + " 3 x 2 x 2 runs");
    if (d.contains("count") && d.contains("concordance")) {
      int c = d["count"].get<int>();
      log.check(d["concordance"]["t0"] == c && d["concordance"]["t1"] == c, std::string(name) + " concordance slices");
      log.check(c == brute_force_degree(g.problem).degree, std::string(name) + " invariant count equals the oracle");
      log.note(std::string(name) + "=" + std::to_string(c));
    }
  }
}

// 7. orientation functoriality
void orientation(Log& log) {
  std::vector<std::pair<std::string, Atlas>> cases{{"ex_change", tame_of(parse_atlas(fixtures::ex_change()))}};
  for (const char* n : {"planar", "identity", "cubic", "three_chart"}) cases.emplace_back(n, tame_of(generate(n).atlas));
  for (const auto& [name, t] : cases) {
    int c = count_of(t), r = count_of(reverse_orientation(t));
    log.check(r == -c, name + " reversal gives " + std::to_string(r) + " for " + std::to_string(c));
    log.note(name + " " + std::to_string(c) + "/" + std::to_string(r));
  }
  // connected overlap graphs: one flipped chart must be rejected before counting
  for (const auto& [name, chart] : std::vector<std::pair<std::string, IndexSet>>{{"ex_change", {1}}, {"three_chart", {2}}}) {
    Atlas t = name == "ex_change" ? cases[0].second : cases.back().second;
    Atlas bad = reverse_orientation(t, chart);
    log.check(!validate_orientation(bad, opts()).passed(), name + " single flip passes validation");
    bool rejected = false;
    try {
      count_of(bad);
    } catch (const VfcError& e) {
      rejected = e.kind() == VfcError::Kind::Orientation;
    }
    log.check(rejected, name + " single flip was counted");
  }
}

// 8. replay
void replay(Log& log) {
  std::vector<PipelineConfig> cfgs;
  for (Stage s : {Stage::Validate, Stage::Tame, Stage::Reduce, Stage::Perturb, Stage::Vfc})
    for (const char* in : {"ex_change", "three_chart"}) {
      PipelineConfig c;
      c.stage = s;
      c.input = in;
      cfgs.push_back(c);
    }
  for (Stage s : {Stage::Generate, Stage::Oracle}) {
    PipelineConfig c;
    c.stage = s;
    c.input = "planar";
    cfgs.push_back(c);
  }
  PipelineConfig inv;
  inv.stage = Stage::Invariance;
  inv.input = "identity";
  cfgs.push_back(inv);
  for (const auto& c : cfgs) {
    PipelineResult a = run_pipeline(c), b = run_pipeline(c);
    const std::string what = std::string(stage_name(c.stage)) + "(" + c.input + ")";
    log.check(a.passed, what + " failed: " + a.first_failure);
    log.check(a.report.dump() == b.report.dump(), what + " report differs");
    log.check(a.plot.has_value() == b.plot.has_value() && (!a.plot || a.plot->dump() == b.plot->dump()), what + " plot differs");
    log.check(a.artifact.has_value() == b.artifact.has_value() && (!a.artifact || a.artifact->dump() == b.artifact->dump()),
              what + " artifact differs");
  }
  log.note(std::to_string(cfgs.size()) + " configurations replayed");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    void (*run)(Log&);
  };
  const Criterion all[] = {
      {1, "fixture verdicts", fixture_verdicts},
      {2, "tame implies strong cocycle", tame_strong},
      {3, "reduction constants", constants},
      {4, "adapted perturbation ledger", adapted},
      {5, "count equals brute-force degree", versus_oracle},
      {6, "invariance over seeds, reductions, norms and concordance", invariance},
      {7, "orientation functoriality", orientation},
      {8, "byte-identical replay", replay},
  };
  bool ok = true;
  for (const auto& c : all) {
    Log log;
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(log);
    } catch (const std::exception& e) {
      log.check(false, std::string("exception: ") + e.what());
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d %s  %s (%.1f s)  [%s]\n", c.id, log.passed() ? "PASS" : "FAIL", c.name, s, log.notes().c_str());
    if (!log.passed()) std::printf("%s", log.failures().c_str());
    std::fflush(stdout);
    ok = ok && log.passed();
  }
  std::printf("acceptance: %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}
