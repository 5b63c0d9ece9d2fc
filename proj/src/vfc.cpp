#include "kuranishi/vfc.hpp"

#include "kuranishi/differential.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kuranishi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int sgn(double v) { return (v > 0) - (v < 0); }

double det(const Mat& M) { return M.rows() == 0 ? 1.0 : M.determinant(); }

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::optional<Vec> image_in(const Atlas& A, const IndexSet& I, const IndexSet& K, const Vec& x) {
  if (I == K) return x;
  if (!A.has_change(I, K)) return std::nullopt;
  return A.change(I, K).apply(x);
}

double pi_C_depth(const ReductionContext& ctx, const IndexSet& I, const Vec& z) {
  const Atlas& A = *ctx.atlas;
  double depth = ctx.C_tilde_depth(I, z);
  for (const auto& H : A.lower(I)) {
    auto it = ctx.C.find(H);
    if (it == ctx.C.end() || it->second.empty() || !A.has_change(H, I)) continue;
    auto y = A.change(H, I).invert(z, ctx.id_tol);
    if (!y) continue;
    for (const auto& b : it->second) depth = std::max(depth, b.inner_depth(*y));
  }
  return depth;
}

}  // namespace

Verdict validate_orientation(const Atlas& atlas, const CheckOptions& opt) {
  Verdict v;
  v.check = "orientation";
  v.tolerance = 0.0;
  long samples = 0;
  for (const auto& [key, ch] : atlas.changes) {
    if (ch.empty()) continue;
    const auto& [I, J] = key;
    const OrientationFrame fI = atlas.frame(I), fJ = atlas.frame(J);
    const Mat FUI = fI.domain_frame.to_double(), FEI = fI.obstruction_frame.to_double();
    const Mat FUJinv = fJ.domain_frame.inverse().to_double(), FEJinv = fJ.obstruction_frame.inverse().to_double();
    const Mat& hat = ch.hat_phi_d();
    const Chart& cJ = atlas.chart(J);
    const int nI = atlas.chart(I).dim(), nJ = cJ.dim(), mJ = cJ.obstruction_dim;
    for (const auto& y : sample_domain(ch.domain(), std::max(3, opt.density / 4), hash_index_set(J, opt.seed))) {
      const int br = ch.branch_at(y);
      if (br < 0) continue;
      const Vec x = ch.apply_branch(br, y);
      const Mat D = ch.jacobian_branch(br, y);
      Mat N = orthogonal_complement(D, opt.tol.rank);
      if (N.cols() != nJ - nI) {
        v.fail({{I, J}, {y}, {0.0}, "dphi does not have full rank"});
        continue;
      }
      Mat dom(nJ, nJ), cod(mJ, mJ);
      dom << D * FUI, N;
      cod << hat * FEI, cJ.section.jacobian(x) * N;
      const double a = det(FUJinv * dom), b = det(FEJinv * cod);
      ++samples;
      v.observe(std::min(std::abs(a), std::abs(b)));
      const int s = fI.sign * fJ.sign * sgn(a) * sgn(b);
      if (s != 1) {
        v.fail({{I, J}, {y, x}, {a, b}, "frames are not compatible with the transition"});
        break;
      }
    }
  }
  v.details["samples"] = samples;
  return v;
}

Atlas reverse_orientation(const Atlas& atlas) {
  Atlas out = atlas;
  for (const auto& I : atlas.index_sets) {
    OrientationFrame f = atlas.frame(I);
    f.sign = -f.sign;
    out.orientation[I] = f;
  }
  return out;
}

Atlas reverse_orientation(const Atlas& atlas, const IndexSet& chart) {
  Atlas out = atlas;
  OrientationFrame f = atlas.frame(chart);
  f.sign = -f.sign;
  out.orientation[chart] = f;
  return out;
}

int orientation_sign(const Atlas& atlas, const SectionField& nu, const IndexSet& I, const Vec& z) {
  const OrientationFrame f = atlas.frame(I);
  const Mat D = atlas.chart(I).section.jacobian(z) + nu.jacobian(I, z);
  const Mat M = f.obstruction_frame.inverse().to_double() * D * f.domain_frame.to_double();
  return f.sign * sgn(det(M));
}

std::vector<SignedZero> find_perturbed_zeros(const ReductionContext& ctx, const SectionField& nu,
                                             const CheckOptions& opt) {
  std::vector<SignedZero> out;
  for (const auto& I : ctx.atlas->index_sets) {
    auto it = ctx.V.find(I);
    if (it == ctx.V.end() || it->second.empty()) continue;
    for (const auto& z : chart_zeros(ctx, nu, I, -1, opt.density))
      out.push_back({I, z.point, orientation_sign(*ctx.atlas, nu, I, z.point), z.sigma_min, -1});
  }
  return out;
}

OrientedZeroSet glue_zero_set(const ReductionContext& ctx, std::vector<SignedZero> zeros, const CheckOptions& opt) {
  const Atlas& A = *ctx.atlas;
  const double tol = opt.tol.id;
  UnionFind uf(zeros.size());
  // images of zero a in chart K
  auto partners = [&](std::size_t a, const IndexSet& K, const Vec& w) {
    std::vector<std::size_t> hits;
    for (std::size_t b = 0; b < zeros.size(); ++b) {
      if (b == a) continue;
      if (zeros[b].chart == K && (zeros[b].point - w).norm() < tol) hits.push_back(b);
    }
    return hits;
  };
  for (std::size_t a = 0; a < zeros.size(); ++a) {
    const IndexSet& I = zeros[a].chart;
    for (const auto& J : A.higher(I)) {
      auto w = image_in(A, I, J, zeros[a].point);
      if (!w) continue;
      auto hits = partners(a, J, *w);
      if (hits.size() > 1)
        throw VfcError(VfcError::Kind::Ambiguous, "ambiguous gluing",
                       {Witness{{I, J}, {zeros[a].point, zeros[hits[0]].point, zeros[hits[1]].point}, {}, ""}});
      if (hits.size() == 1) uf.unite(a, hits[0]);
    }
    // same chart: two zeros closer than the tolerance cannot be told apart
    auto same = partners(a, I, zeros[a].point);
    if (!same.empty())
      throw VfcError(VfcError::Kind::Ambiguous, "ambiguous gluing",
                     {Witness{{I}, {zeros[a].point, zeros[same[0]].point}, {}, "duplicate zero"}});
  }
  // incomparable charts meeting in a common superset
  for (std::size_t a = 0; a < zeros.size(); ++a)
    for (std::size_t b = a + 1; b < zeros.size(); ++b) {
      const IndexSet &I = zeros[a].chart, &J = zeros[b].chart;
      if (comparable(I, J) || uf.find(a) == uf.find(b)) continue;
      for (const auto& K : A.higher(I)) {
        if (!is_subset(J, K)) continue;
        auto wa = image_in(A, I, K, zeros[a].point), wb = image_in(A, J, K, zeros[b].point);
        if (wa && wb && (*wa - *wb).norm() < tol) uf.unite(a, b);
      }
    }

  OrientedZeroSet out;
  std::map<std::size_t, int> root_to_class;
  for (std::size_t a = 0; a < zeros.size(); ++a) {
    auto r = uf.find(a);
    auto it = root_to_class.find(r);
    if (it == root_to_class.end()) {
      it = root_to_class.emplace(r, static_cast<int>(out.classes.size())).first;
      out.classes.emplace_back();
      out.classes.back().confinement = -kInf;
    }
    zeros[a].cls = it->second;
    out.classes[it->second].members.push_back(a);
  }
  // Hausdorff at class level: distinct classes stay apart wherever they share a chart
  for (std::size_t a = 0; a < zeros.size(); ++a)
    for (std::size_t b = a + 1; b < zeros.size(); ++b) {
      if (zeros[a].cls == zeros[b].cls) continue;
      for (const auto& K : A.index_sets) {
        if (!is_subset(zeros[a].chart, K) || !is_subset(zeros[b].chart, K)) continue;
        auto wa = image_in(A, zeros[a].chart, K, zeros[a].point), wb = image_in(A, zeros[b].chart, K, zeros[b].point);
        if (wa && wb) out.separation = std::min(out.separation, (*wa - *wb).norm());
      }
    }
  for (auto& c : out.classes) {
    for (auto m : c.members) c.confinement = std::max(c.confinement, pi_C_depth(ctx, zeros[m].chart, zeros[m].point));
    if (!(c.confinement > 0)) {
      const auto& z = zeros[c.members.front()];
      throw VfcError(VfcError::Kind::Confinement, "zero class outside pi(C)",
                     {Witness{{z.chart}, {z.point}, {c.confinement}, ""}});
    }
  }
  out.zeros = std::move(zeros);
  return out;
}

OrientedZeroSet vfc_count(const ReductionContext& ctx, const SectionField& nu, const CheckOptions& opt) {
  const Atlas& A = *ctx.atlas;
  if (A.dimension != 0) throw VfcError(VfcError::Kind::Dimension, "signed counts need d = 0");
  Verdict ov = validate_orientation(A, opt);
  if (!ov.passed()) throw VfcError(VfcError::Kind::Orientation, "orientation frames are inconsistent", ov.witnesses);
  auto zeros = find_perturbed_zeros(ctx, nu, opt);
  for (const auto& z : zeros)
    if (!(z.sigma_min > opt.tol.transv))
      throw VfcError(VfcError::Kind::NonTransverse, "non-transverse perturbed zero",
                     {Witness{{z.chart}, {z.point}, {z.sigma_min}, ""}});
  OrientedZeroSet out = glue_zero_set(ctx, std::move(zeros), opt);
  for (auto& c : out.classes) {
    c.sign = out.zeros[c.members.front()].sign;
    for (auto m : c.members)
      if (out.zeros[m].sign != c.sign) {
        const auto& a = out.zeros[c.members.front()];
        const auto& b = out.zeros[m];
        throw VfcError(VfcError::Kind::SignMismatch, "identified zeros carry different signs",
                       {Witness{{a.chart, b.chart}, {a.point, b.point}, {double(a.sign), double(b.sign)}, ""}});
      }
    out.count += c.sign;
  }
  return out;
}

Json OrientedZeroSet::to_json() const {
  Json j;
  j["count"] = count;
  Json cs = Json::array();
  for (const auto& c : classes) {
    Json cj;
    cj["sign"] = c.sign;
    cj["confinement"] = number_json(c.confinement);
    Json ms = Json::array();
    for (auto m : c.members) {
      Json mj;
      mj["chart"] = Json(std::vector<int>(zeros[m].chart.begin(), zeros[m].chart.end()));
      mj["point"] = vec_json(zeros[m].point);
      mj["sign"] = zeros[m].sign;
      mj["margin"] = number_json(zeros[m].sigma_min);
      ms.push_back(mj);
    }
    cj["members"] = ms;
    cs.push_back(cj);
  }
  j["classes"] = cs;
  j["separation"] = number_json(separation);
  return j;
}

double ConcordanceField::chi(double t) {
  if (t <= 1.0 / 3) return 0.0;
  if (t >= 2.0 / 3) return 1.0;
  const double s = 3.0 * t - 1.0;  // in (0, 1)
  const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

Vec ConcordanceField::eval(const IndexSet& J, const Vec& tx) const {
  const double c = chi(tx[0]);
  const Vec x = tx.tail(tx.size() - 1);
  if (c == 0.0) return nu0_.eval(J, x);
  if (c == 1.0) return nu1_.eval(J, x);
  return (1.0 - c) * nu0_.eval(J, x) + c * nu1_.eval(J, x);
}

Vec SlicedField::eval(const IndexSet& J, const Vec& x) const {
  Vec tx(x.size() + 1);
  tx[0] = t_;
  tx.tail(x.size()) = x;
  return nu_.eval(J, tx);
}

ReductionContext reduce_for_count(const Atlas& tame, ReductionStyle style, double norm_scale, const CheckOptions& opt) {
  ReductionOptions ro;
  ro.check = opt;
  ro.style = style;
  ReductionContext ctx = build_reduction(tame, ro);
  build_nested(ctx, opt);
  ctx.norms.scale = norm_scale;
  ctx.sigma_bound = compute_sigma(ctx, opt);
  ctx.sigma = ctx.sigma_bound.value;
  return ctx;
}

Verdict invariance_check(const Atlas& tame, const InvarianceOptions& opt) {
  Verdict v;
  v.check = "invariance";
  v.tolerance = 0.0;
  Json runs = Json::array();
  std::optional<int> reference;
  PerturbOptions po;
  po.check = opt.check;
  std::optional<ReductionContext> first_ctx;
  for (auto style : opt.styles)
    for (double scale : opt.norm_scales) {
      ReductionContext ctx;
      try {
        ctx = reduce_for_count(tame, style, scale, opt.check);
      } catch (const std::exception& e) {
        v.fail({{}, {}, {}, std::string("reduction failed: ") + e.what()});
        continue;
      }
      if (!first_ctx) first_ctx = ctx;
      for (auto seed : opt.seeds) {
        Json r;
        r["style"] = reduction_style_name(style);
        r["norm_scale"] = number_json(scale);
        r["seed"] = seed;
        try {
          Perturbation p = build_adapted(ctx, seed, po);
          if (opt.tamper) opt.tamper(p, runs.size());
          auto z = vfc_count(ctx, p, opt.check);
          r["count"] = z.count;
          r["perturbation"] = p.to_json();
          if (!reference) reference = z.count;
          if (z.count != *reference)
            v.fail({{}, {}, {double(z.count), double(*reference)},
                    std::string("count differs: style ") + reduction_style_name(style) + ", seed " +
                        std::to_string(seed)});
        } catch (const std::exception& e) {
          r["error"] = e.what();
          v.fail({{}, {}, {}, std::string("run failed: ") + e.what()});
        }
        runs.push_back(r);
      }
    }
  v.details["runs"] = runs;
  if (reference) v.details["count"] = *reference;

  // product concordance with an interpolated perturbation between two seeds
  Json conc;
  if (first_ctx && opt.seeds.size() >= 2) {
    try {
      const ReductionContext& ctx = *first_ctx;
      Atlas prod = product_concordance(*ctx.atlas);
      Verdict idx = check_index_condition(prod, opt.check);
      conc["index_condition"] = status_name(idx.status);
      if (!idx.passed()) v.fail({{}, {}, {}, "product concordance fails the index condition"});
      Perturbation p0 = build_adapted(ctx, opt.seeds[0], po), p1 = build_adapted(ctx, opt.seeds[1], po);
      ConcordanceField nu(p0, p1);
      for (int end = 0; end <= 1; ++end) {
        Atlas slice = slice_concordance(prod, Rational(end));
        std::string why;
        if (!same_fields(slice, *ctx.atlas, &why)) {
          v.fail({{}, {}, {}, "boundary slice differs from the atlas: " + why});
          continue;
        }
        SlicedField restricted(nu, end);
        const int boundary = vfc_count(ctx, restricted, opt.check).count;
        const int direct = vfc_count(ctx, end == 0 ? static_cast<const SectionField&>(p0) : p1, opt.check).count;
        conc[end == 0 ? "t0" : "t1"] = boundary;
        if (boundary != direct) v.fail({{}, {}, {double(boundary), double(direct)}, "boundary restriction count differs"});
        if (reference && boundary != *reference)
          v.fail({{}, {}, {double(boundary), double(*reference)}, "concordance boundary count differs"});
      }
    } catch (const std::exception& e) {
      v.fail({{}, {}, {}, std::string("concordance failed: ") + e.what()});
    }
  }
  v.details["concordance"] = conc;
  v.margin = v.passed() ? 0.0 : -1.0;
  return v;
}

}  // namespace kuranishi
