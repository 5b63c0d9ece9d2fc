#include "kuranishi/perturb.hpp"

#include "kuranishi/differential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kuranishi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1 for d <= a, 0 for d >= b, smooth and monotone in between.
double ramp(double d, double a, double b) {
  if (d <= a) return 1.0;
  if (d >= b) return 0.0;
  const double t = (d - a) / (b - a);
  return bump_profile(t * t);
}

int per_axis(int density, int n) {
  if (n <= 1) return 4 * density;
  if (n == 2) return density;
  return std::max(6, density / 2);
}

// Grid points of V^level_J (level < 0: of V_J) inside U_J.
std::vector<Vec> level_samples(const ReductionContext& ctx, const IndexSet& J, double level, int density,
                               std::uint64_t seed, double jitter) {
  std::vector<Vec> out;
  auto it = ctx.V.find(J);
  if (it == ctx.V.end()) return out;
  const Chart& ch = ctx.atlas->chart(J);
  const double r = level < 0 ? 0.0 : ctx.radius(level);
  const int k = per_axis(density, ch.dim());
  std::uint64_t s = hash_index_set(J, seed);
  for (const auto& b : it->second) {
    for (auto& x : sample_box(r > 0 ? b.expanded(r) : b, k, s++, jitter)) {
      const double dv = ctx.dist_V(J, x);
      if ((level < 0 ? dv == 0.0 : dv < r) && ch.domain.contains(x)) out.push_back(std::move(x));
    }
  }
  return out;
}

Vec bumps_at(const std::vector<LocalBump>& bumps, int m, const Vec& x) {
  Vec v = Vec::Zero(m);
  for (const auto& b : bumps) {
    const double q = (x - b.center).squaredNorm() / (b.radius * b.radius);
    if (q < 1.0) v += bump_profile(q) * b.coeff;
  }
  return v;
}

// Orthogonal projector onto the column span of H.
Mat span_projector(const Mat& H) {
  if (H.cols() == 0) return Mat::Zero(H.rows(), H.rows());
  return H * H.completeOrthogonalDecomposition().pseudoInverse();
}

double min_core_distance(const ReductionContext& ctx, const IndexSet& J, const std::vector<IndexSet>& lower,
                         double k, const Vec& x) {
  double d = kInf;
  for (const auto& I : lower) d = std::min(d, ctx.core_distance(k, J, I, x));
  return d;
}

// Perturbation with one chart replaced by a draft.
class Draft : public SectionField {
 public:
  Draft(const Perturbation& p, const ChartPerturbation& cp) : p_(p), cp_(cp) {}
  Vec eval(const IndexSet& J, const Vec& x) const override {
    if (J != cp_.index) return p_.eval(J, x);
    return p_.extension_of(cp_, x) + bumps_at(cp_.bumps, p_.ctx->atlas->chart(J).obstruction_dim, x);
  }

 private:
  const Perturbation& p_;
  const ChartPerturbation& cp_;
};

Json bump_json(const LocalBump& b) {
  Json j;
  j["center"] = vec_json(b.center);
  j["radius"] = number_json(b.radius);
  j["coeff"] = vec_json(b.coeff);
  return j;
}

Vec json_vec(const Json& j) {
  Vec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

double json_number(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

Json index_json(const IndexSet& I) {
  Json a = Json::array();
  for (int i : I) a.push_back(i);
  return a;
}

IndexSet json_index(const Json& j) {
  IndexSet I;
  for (const auto& v : j) I.push_back(v.get<int>());
  return I;
}

}  // namespace

Mat SectionField::jacobian(const IndexSet& J, const Vec& x) const {
  const Vec f0 = eval(J, x);
  Mat D(f0.size(), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Vec a = x, b = x;
    a[k] += fd_step;
    b[k] -= fd_step;
    D.col(k) = (eval(J, a) - eval(J, b)) / (2 * fd_step);
  }
  return D;
}

Vec Perturbation::extension_of(const ChartPerturbation& cp, const Vec& x) const {
  const Atlas& A = *ctx->atlas;
  const int m = A.chart(cp.index).obstruction_dim;
  Vec mix = Vec::Zero(m);
  if (cp.lower.empty()) return mix;
  const double k = cp.level - 0.5;
  double dmin = kInf;
  for (const auto& I : cp.lower) {
    const double d = ctx->core_distance(k, cp.index, I, x);
    dmin = std::min(dmin, d);
    const double w = ramp(d, cp.r_in, cp.r_out);
    if (w <= 0.0) continue;
    const auto& ch = A.change(I, cp.index);
    auto pr = ch.project(x);
    if (!pr) continue;
    Vec T = ch.hat_phi_d() * eval(I, pr->y);
    mix = (1.0 - w) * mix + w * T;
  }
  return ramp(dmin, cp.beta_in, cp.beta_out) * mix;
}

Vec Perturbation::extension(const IndexSet& J, const Vec& x) const { return extension_of(charts.at(J), x); }

Vec Perturbation::bump_part(const IndexSet& J, const Vec& x) const {
  return bumps_at(charts.at(J).bumps, ctx->atlas->chart(J).obstruction_dim, x);
}

Vec Perturbation::eval(const IndexSet& J, const Vec& x) const {
  const auto& cp = charts.at(J);
  return extension_of(cp, x) + bumps_at(cp.bumps, ctx->atlas->chart(J).obstruction_dim, x);
}

std::vector<Vec> Perturbation::components(const IndexSet& J, const Vec& x) const {
  return ctx->components(J, eval(J, x));
}

Perturbation Perturbation::scaled(double c) const {
  Perturbation q = *this;
  for (auto& [J, cp] : q.charts) {
    for (auto& b : cp.bumps) b.coeff *= c;
    cp.tilde_bound *= std::abs(c);
    cp.budget *= std::abs(c);
    cp.bound *= std::abs(c);
  }
  return q;
}

bool Perturbation::identical(const Perturbation& o) const {
  if (seed != o.seed || sigma_used != o.sigma_used || charts.size() != o.charts.size()) return false;
  for (const auto& [J, a] : charts) {
    auto it = o.charts.find(J);
    if (it == o.charts.end()) return false;
    const auto& b = it->second;
    if (a.lower != b.lower || a.r_in != b.r_in || a.r_out != b.r_out || a.beta_in != b.beta_in ||
        a.beta_out != b.beta_out || a.bumps.size() != b.bumps.size())
      return false;
    for (std::size_t i = 0; i < a.bumps.size(); ++i)
      if (a.bumps[i].center != b.bumps[i].center || a.bumps[i].radius != b.bumps[i].radius ||
          a.bumps[i].coeff != b.bumps[i].coeff)
        return false;
  }
  return true;
}

Json Perturbation::to_json() const {
  Json j;
  j["seed"] = seed;
  j["sigma"] = number_json(sigma_used);
  Json cs = Json::array();
  for (const auto& I : ctx->atlas->index_sets) {
    auto it = charts.find(I);
    if (it == charts.end()) continue;
    const auto& cp = it->second;
    Json c;
    c["index"] = index_json(I);
    c["level"] = cp.level;
    Json lo = Json::array();
    for (const auto& L : cp.lower) lo.push_back(index_json(L));
    c["lower"] = lo;
    c["r_in"] = number_json(cp.r_in);
    c["r_out"] = number_json(cp.r_out);
    c["beta_in"] = number_json(cp.beta_in);
    c["beta_out"] = number_json(cp.beta_out);
    Json bs = Json::array();
    for (const auto& b : cp.bumps) bs.push_back(bump_json(b));
    c["bumps"] = bs;
    c["tilde_bound"] = number_json(cp.tilde_bound);
    c["budget"] = number_json(cp.budget);
    c["bound"] = number_json(cp.bound);
    c["attempts"] = cp.attempts;
    c["min_transversality"] = number_json(cp.min_transversality);
    cs.push_back(c);
  }
  j["charts"] = cs;
  j["ledger"] = ledger;
  return j;
}

Perturbation perturbation_from_json(const ReductionContext& ctx, const Json& j) {
  Perturbation p;
  p.ctx = std::make_shared<const ReductionContext>(ctx);
  p.seed = j.at("seed").get<std::uint64_t>();
  p.sigma_used = json_number(j.at("sigma"));
  for (const auto& c : j.at("charts")) {
    ChartPerturbation cp;
    cp.index = json_index(c.at("index"));
    cp.level = c.at("level").get<int>();
    for (const auto& L : c.at("lower")) cp.lower.push_back(json_index(L));
    cp.r_in = json_number(c.at("r_in"));
    cp.r_out = json_number(c.at("r_out"));
    cp.beta_in = json_number(c.at("beta_in"));
    cp.beta_out = json_number(c.at("beta_out"));
    for (const auto& b : c.at("bumps"))
      cp.bumps.push_back({json_vec(b.at("center")), json_number(b.at("radius")), json_vec(b.at("coeff"))});
    cp.tilde_bound = json_number(c.at("tilde_bound"));
    cp.budget = json_number(c.at("budget"));
    cp.bound = json_number(c.at("bound"));
    cp.attempts = c.at("attempts").get<int>();
    cp.min_transversality = json_number(c.at("min_transversality"));
    if (!ctx.atlas->has_chart(cp.index)) throw AtlasError(AtlasError::Kind::Schema, "perturbation names an unknown chart");
    p.charts.emplace(cp.index, std::move(cp));
  }
  for (const auto& I : ctx.atlas->index_sets)
    if (!p.charts.count(I)) throw AtlasError(AtlasError::Kind::Schema, "perturbation is missing a chart");
  if (j.contains("ledger")) p.ledger = j.at("ledger");
  return p;
}

double transversality_margin(const Atlas& atlas, const SectionField& nu, const IndexSet& J, const Vec& x) {
  const Chart& ch = atlas.chart(J);
  return min_singular_value(ch.section.jacobian(x) + nu.jacobian(J, x));
}

std::vector<ChartZero> chart_zeros(const ReductionContext& ctx, const SectionField& nu, const IndexSet& J,
                                   double level, int density, std::uint64_t seed, Exec exec) {
  const Chart& ch = ctx.atlas->chart(J);
  auto seeds = level_samples(ctx, J, level, density, seed, seed ? 0.25 : 0.0);
  VecFn F = [&](const Vec& x) { return Vec(ch.section.eval(x) + nu.eval(J, x)); };
  MatFn D = [&](const Vec& x) { return Mat(ch.section.jacobian(x) + nu.jacobian(J, x)); };
  auto res = newton_multistart(F, D, seeds, {}, exec);
  const double r = level < 0 ? 0.0 : ctx.radius(level);
  std::vector<Vec> found;
  for (const auto& nr : res) {
    if (!nr.converged || !ch.domain.contains(nr.x)) continue;
    const double dv = ctx.dist_V(J, nr.x);
    if (level < 0 ? dv > 0.0 : dv >= r) continue;
    found.push_back(nr.x);
  }
  found = dedupe_points(std::move(found), ctx.id_tol);
  std::vector<ChartZero> out;
  for (const auto& z : found)
    out.push_back({J, z, min_singular_value(D(z)), F(z).norm()});
  return out;
}

std::optional<Vec> pushforward_mu(const Perturbation& p, const IndexSet& J, const Vec& x, double k) {
  const Atlas& A = *p.ctx->atlas;
  for (const auto& I : A.lower(J)) {
    if (!p.ctx->in_core(k, J, I, x)) continue;
    auto y = A.change(I, J).invert(x, p.ctx->id_tol);
    if (!y) throw PerturbError(PerturbError::Kind::Inversion, "core point not in the image of the coordinate change");
    return Vec(A.change(I, J).hat_phi_d() * p.eval(I, *y));
  }
  return std::nullopt;
}

namespace {

ChartPerturbation build_chart(const Perturbation& p, const IndexSet& J, const PerturbOptions& opt) {
  const ReductionContext& ctx = *p.ctx;
  const Atlas& A = *ctx.atlas;
  const int L = static_cast<int>(J.size());
  const int m = A.chart(J).obstruction_dim;
  ChartPerturbation cp;
  cp.index = J;
  cp.level = L;
  cp.r_in = ctx.eta(L - 0.5);
  cp.r_out = ctx.eta(L - 1);
  cp.beta_in = ctx.eta(L - 0.5) / 2;
  cp.beta_out = 0.95 * ctx.eta(L - 0.5);
  auto vj = ctx.V.find(J);
  const bool active = vj != ctx.V.end() && !vj->second.empty();
  if (active)
    for (const auto& I : A.lower(J)) {
      auto vi = ctx.V.find(I);
      if (vi == ctx.V.end() || vi->second.empty() || !A.has_change(I, J) || A.change(I, J).empty()) continue;
      cp.lower.push_back(I);
      cp.tilde_bound = std::max(cp.tilde_bound, p.charts.at(I).bound);
    }
  cp.budget = 0.5 * (p.sigma_used - cp.tilde_bound);
  if (!(cp.budget > 0))
    throw PerturbError(PerturbError::Kind::Budget, "no amplitude left below sigma", cp.budget);
  cp.bound = cp.tilde_bound;
  if (!active) return cp;

  const double tv = opt.check.tol.transv;
  auto zeros = chart_zeros(ctx, Draft(p, cp), J, L, opt.check.density, 0, Exec::Serial);
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    cp.min_transversality = std::min(cp.min_transversality, zeros[i].sigma_min);
    if (!(zeros[i].sigma_min > tv)) bad.push_back(i);
  }
  if (bad.empty()) return cp;

  std::vector<double> radii;
  for (std::size_t i : bad) {
    const Vec& z = zeros[i].point;
    const double bprime = min_core_distance(ctx, J, cp.lower, L, z) - ctx.eta(L);
    if (!(bprime > 0)) {
      Witness w{{J}, {z}, {zeros[i].sigma_min}, "degenerate zero on a core ball"};
      throw PerturbError(PerturbError::Kind::Transversality, "degenerate zero inside B'", zeros[i].sigma_min, {w});
    }
    const double depth = ctx.C_tilde_depth(J, z);
    if (!(depth > 0)) {
      Witness w{{J}, {z}, {depth}, "degenerate zero outside C~"};
      throw PerturbError(PerturbError::Kind::Confinement, "degenerate zero outside C~", zeros[i].sigma_min, {w});
    }
    double nearest = kInf;
    for (std::size_t o = 0; o < zeros.size(); ++o)
      if (o != i) nearest = std::min(nearest, (zeros[o].point - z).norm());
    radii.push_back(0.9 * std::min({depth, bprime, 0.45 * nearest}));
  }

  Rng rng(hash_index_set(J, p.seed));
  double worst = 0.0;
  for (int attempt = 1; attempt <= opt.max_attempts; ++attempt) {
    cp.bumps.clear();
    for (std::size_t b = 0; b < bad.size(); ++b) {
      Vec u(m);
      for (int i = 0; i < m; ++i) u[i] = rng.uniform(-1.0, 1.0);
      const double nu = ctx.norm(J, u);
      const double amp = cp.budget * rng.uniform(0.25, 1.0);
      if (nu > 0) u *= amp / nu;
      cp.bumps.push_back({zeros[bad[b]].point, radii[b], u});
    }
    auto after = chart_zeros(ctx, Draft(p, cp), J, L, opt.check.density, 0, Exec::Serial);
    worst = kInf;
    for (const auto& z : after) worst = std::min(worst, z.sigma_min);
    if (worst > tv) {
      cp.attempts = attempt;
      cp.min_transversality = worst;
      cp.bound = cp.tilde_bound + cp.budget;
      return cp;
    }
  }
  throw PerturbError(PerturbError::Kind::Transversality, "transversality not achieved", worst,
                     {Witness{{J}, {}, {worst}, "retries exhausted"}});
}

}  // namespace

Perturbation build_adapted(const ReductionContext& ctx, std::uint64_t seed, const PerturbOptions& opt) {
  if (ctx.atlas->dimension != 0) throw AtlasError(AtlasError::Kind::Dimension, "perturbations are built for d = 0");
  Perturbation p;
  p.ctx = std::make_shared<const ReductionContext>(ctx);
  p.seed = seed;
  p.sigma_used = ctx.sigma;
  if (!(ctx.sigma > 0)) throw PerturbError(PerturbError::Kind::Budget, "sigma must be positive", ctx.sigma);
  const Atlas& A = *ctx.atlas;
  for (int L = 1; L <= A.max_level(); ++L) {
    std::vector<IndexSet> level;
    for (const auto& J : A.index_sets)
      if (static_cast<int>(J.size()) == L) level.push_back(J);
    auto built = parallel_map<ChartPerturbation>(
        level.size(), [&](std::size_t i) { return build_chart(p, level[i], opt); }, opt.exec);
    for (auto& cp : built) p.charts.emplace(cp.index, std::move(cp));
  }
  for (const auto& v : verify_conditions(p, opt.check)) p.ledger[v.check] = number_json(v.margin);
  return p;
}

std::vector<Verdict> verify_conditions(const Perturbation& p, const CheckOptions& opt) {
  const ReductionContext& ctx = *p.ctx;
  const Atlas& A = *ctx.atlas;
  const auto& tol = opt.tol;
  const std::uint64_t fresh = mix64(opt.seed ^ 0x5eedf00dULL);
  auto active = [&](const IndexSet& I) {
    auto it = ctx.V.find(I);
    return it != ctx.V.end() && !it->second.empty();
  };

  auto named = [](const char* n) {
    Verdict v;
    v.check = n;
    return v;
  };
  Verdict a = named("compatibility"), b = named("transversality"), c = named("admissibility"),
          dd = named("derivative_admissibility"), d = named("confinement"), e = named("smallness");
  a.tolerance = tol.eq;
  b.tolerance = tol.transv;
  c.tolerance = tol.eq;
  dd.tolerance = tol.transv;
  e.tolerance = p.sigma_used;
  long na = 0, nc = 0, nb = 0, ne = 0;

  for (const auto& [key, ch] : A.changes) {
    const auto& [H, I] = key;
    if (!active(H) || !active(I) || ch.empty()) continue;
    const double level = static_cast<double>(I.size());
    const Mat P = span_projector(ch.hat_phi_d());
    const Mat Q = Mat::Identity(P.rows(), P.cols()) - P;
    const double eta = ctx.eta(level);
    Rng rng(hash_index_set(H, hash_index_set(I, fresh)));
    for (const auto& y : level_samples(ctx, H, level, opt.density, hash_index_set(I, fresh), 0.25)) {
      int br = ch.branch_at(y);
      if (br < 0) continue;
      Vec x = ch.apply_branch(br, y);
      if (!(ctx.dist_V(I, x) < ctx.radius(level))) continue;
      ++na;
      const double err = (p.eval(I, x) - ch.hat_phi_d() * p.eval(H, y)).norm();
      a.observe(tol.eq - err);
      if (!(err <= tol.eq)) a.fail({{H, I}, {y, x}, {err}, "nu_I(phi(y)) != hat_phi nu_H(y)"});
      // strong admissibility on the eta-ball around the core point
      for (double t : {0.0, 0.5, 0.9}) {
        Vec u(x.size());
        for (Eigen::Index k = 0; k < u.size(); ++k) u[k] = rng.uniform(-1.0, 1.0);
        Vec xt = u.norm() > 0 ? Vec(x + t * eta * u / u.norm()) : x;
        if (!A.chart(I).domain.contains(xt) || !(ctx.core_distance(level, I, H, xt) < eta)) continue;
        ++nc;
        const double off = (Q * p.eval(I, xt)).norm();
        c.observe(tol.eq - off);
        if (!(off <= tol.eq)) c.fail({{I, H}, {xt}, {off}, "value leaves hat_phi(E_H) on the core ball"});
        const double doff = (Q * p.jacobian(I, xt)).norm();
        dd.observe(tol.transv - doff);
        if (!(doff <= tol.transv)) dd.fail({{I, H}, {xt}, {doff}, "derivative leaves hat_phi(E_H)"});
      }
    }
  }

  for (const auto& I : A.index_sets) {
    if (!active(I)) continue;
    const double level = static_cast<double>(I.size());
    for (const auto& z : chart_zeros(ctx, p, I, level, opt.density, fresh, default_exec())) {
      ++nb;
      b.observe(z.sigma_min - tol.transv);
      if (!(z.sigma_min > tol.transv)) b.fail({{I}, {z.point}, {z.sigma_min}, "non-transverse zero"});
      if (!(ctx.dist_V(I, z.point) == 0.0)) continue;
      double depth = ctx.C_tilde_depth(I, z.point);
      for (const auto& H : A.lower(I)) {
        if (!A.has_change(H, I) || !ctx.C.count(H)) continue;
        auto y = A.change(H, I).invert(z.point, ctx.id_tol);
        if (!y) continue;
        for (const auto& box : ctx.C.at(H)) depth = std::max(depth, box.inner_depth(*y));
      }
      d.observe(depth);
      if (!(depth > 0)) d.fail({{I}, {z.point}, {depth}, "perturbed zero outside pi(C)"});
    }
    auto pts = level_samples(ctx, I, level, opt.density, hash_index_set(I, fresh ^ 0xeULL), 0.25);
    auto norms = parallel_map<double>(pts.size(), [&](std::size_t i) { return ctx.norm(I, p.eval(I, pts[i])); });
    for (std::size_t i = 0; i < pts.size(); ++i) {
      ++ne;
      e.observe(p.sigma_used - norms[i]);
      if (!(norms[i] < p.sigma_used)) e.fail({{I}, {pts[i]}, {norms[i]}, "||nu|| >= sigma"});
    }
  }
  a.details["samples"] = na;
  b.details["zeros"] = nb;
  c.details["samples"] = nc;
  dd.details["samples"] = nc;
  d.details["zeros"] = nb;
  e.details["samples"] = ne;
  e.details["sigma"] = number_json(p.sigma_used);
  return {a, b, c, dd, d, e};
}

Verdict verify_adapted(const Perturbation& p, const CheckOptions& opt) {
  auto parts = verify_conditions(p, opt);
  Verdict v = merge("adapted", parts);
  for (const auto& part : parts) v.details[part.check] = verdict_json(part);
  return v;
}

}  // namespace kuranishi
