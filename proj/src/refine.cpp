#include "kuranishi/refine.hpp"

#include "kuranishi/differential.hpp"
#include "kuranishi/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace kuranishi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool size_lex_less(const IndexSet& a, const IndexSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

double min_box_distance(const std::vector<Box>& boxes, const Vec& x) {
  double d = kInf;
  for (const auto& b : boxes) d = std::min(d, b.distance(x));
  return d;
}

// Box over-approximation of |x_k| on a box, for coefficient bounds.
std::vector<double> abs_radius(const Box& b, double pad) {
  std::vector<double> r(b.dim());
  for (int k = 0; k < b.dim(); ++k) r[k] = std::max(std::fabs(b.lo_d[k]), std::fabs(b.hi_d[k])) + pad;
  return r;
}

// Lipschitz bound for x -> s(x) in the Euclidean norm on the box.
double section_lipschitz(const SmoothMap& s, const Box& b, double pad) {
  if (s.codomain_dim() == 0 || b.dim() == 0) return 0.0;
  if (!s.is_polynomial()) {
    double m = 0.0;
    for (const auto& x : sample_box(b, 8, 0, 0.0)) {
      Mat D = s.jacobian(x);
      m = std::max(m, D.norm());
    }
    return 2.0 * m;
  }
  auto r = abs_radius(b, pad);
  double f = 0.0;
  for (const auto& p : s.components())
    for (int k = 0; k < b.dim(); ++k) {
      double v = p.derivative(k).abs_bound(r);
      f += v * v;
    }
  return std::sqrt(f);
}

// Euclidean depth of a closed box inside a domain (0 when it pokes out).
double box_depth(const Domain& D, const Box& b) {
  const Vec c = b.center();
  int pi = D.piece_containing(c);
  if (pi < 0) return 0.0;
  const DomainPiece& P = D.pieces()[pi];
  double d = kInf;
  for (int k = 0; k < b.dim(); ++k) d = std::min({d, b.lo_d[k] - P.box.lo_d[k], P.box.hi_d[k] - b.hi_d[k]});
  if (!P.constraints.empty()) {
    auto r = abs_radius(b, 0.5);
    for (const auto& p : P.constraints) {
      double g = 0.0;
      for (int k = 0; k < b.dim(); ++k) {
        double v = p.derivative(k).abs_bound(r);
        g += v * v;
      }
      g = std::sqrt(g);
      double lo = kInf;
      for (const auto& x : sample_box(b, 6, 0, 0.0)) lo = std::min(lo, p.eval(x));
      // grid points sit within half a cell diagonal of every point of b
      const double hh = 0.5 * (b.widths() / 6.0).norm();
      lo -= g * hh;
      d = std::min(d, g > 0 ? lo / g : (lo > 0 ? d : 0.0));
    }
  }
  return std::max(0.0, d);
}

Json box_json(const Box& b) {
  Json out = Json::array();
  for (int k = 0; k < b.dim(); ++k) out.push_back(Json::array({rational_json(b.lo[k]), rational_json(b.hi[k])}));
  return out;
}

Box box_from_json(const Json& j) {
  std::vector<Rational> lo, hi;
  for (const auto& iv : j) {
    lo.push_back(json_rational(iv.at(0)));
    hi.push_back(json_rational(iv.at(1)));
  }
  return Box(lo, hi);
}

Json boxes_json(const std::map<IndexSet, std::vector<Box>>& m) {
  Json out = Json::array();
  for (const auto& [I, bs] : m) {
    Json e;
    e["index"] = I;
    Json arr = Json::array();
    for (const auto& b : bs) arr.push_back(box_json(b));
    e["boxes"] = arr;
    out.push_back(e);
  }
  return out;
}

std::map<IndexSet, std::vector<Box>> boxes_from_json(const Json& j) {
  std::map<IndexSet, std::vector<Box>> out;
  for (const auto& e : j) {
    IndexSet I = e.at("index").get<IndexSet>();
    for (const auto& b : e.at("boxes")) out[I].push_back(box_from_json(b));
  }
  return out;
}

// Sampled distance between phi_IL(V_I ∩ U_IL) and phi_JL(V_J ∩ U_JL), minus the grid slack.
double image_distance(const Atlas& atlas, const IndexSet& I, const std::vector<Box>& VI, const IndexSet& J,
                      const std::vector<Box>& VJ, const IndexSet& L, int density) {
  struct Img {
    std::vector<Vec> pts;
    double slack = 0.0;
  };
  auto images = [&](const IndexSet& A, const std::vector<Box>& boxes) {
    Img out;
    const auto& ch = atlas.change(A, L);
    for (const auto& b : boxes) {
      const double hh = 0.5 * (b.widths() / density).norm();
      double lip = 0.0;
      for (const auto& x : sample_box(b, density, 0, 0.0)) {
        int br = ch.branch_at(x);
        if (br < 0) continue;
        out.pts.push_back(ch.apply_branch(br, x));
        lip = std::max(lip, ch.jacobian_branch(br, x).norm());
      }
      out.slack = std::max(out.slack, (ch.branches().empty() || ch.branches()[0].phi.is_affine() ? 1.0 : 1.5) * lip * hh);
    }
    return out;
  };
  Img a = images(I, VI), b = images(J, VJ);
  if (a.pts.empty() || b.pts.empty()) return 1.0;
  auto mins = parallel_map<double>(a.pts.size(), [&](std::size_t i) {
    double m = kInf;
    for (const auto& q : b.pts) m = std::min(m, (a.pts[i] - q).norm());
    return m;
  });
  double m = *std::min_element(mins.begin(), mins.end());
  return std::max(0.0, m - a.slack - b.slack);
}

}  // namespace

ShrinkResult find_tame_shrinking(const Atlas& atlas, const CheckOptions& opt, int max_iters, bool preshrunk,
                                 const Rational& first_margin) {
  CloudOptions co;
  co.density = opt.density;
  co.seed = opt.seed;
  co.tol = opt.tol;
  std::vector<Witness> failures;
  Rational m = first_margin;
  for (int it = 1; it <= max_iters; ++it, m /= 2) {
    try {
      Atlas s = shrink_uniform(atlas, m);
      Verdict t = check_tameness(s, opt);
      if (t.passed() && preshrunk) {
        Atlas s2 = shrink_uniform(s, m);
        Verdict t2 = check_tameness(s2, opt);
        if (t2.passed()) {
          s = std::move(s2);
          t = std::move(t2);
        } else {
          t = std::move(t2);
        }
      }
      if (t.passed()) {
        check_footprints_preserved(atlas, s, co);
        s.kind = DeclaredKind::Tame;
        return ShrinkResult{std::move(s), m, it, std::move(t)};
      }
      for (auto w : t.witnesses) {
        w.note = "margin " + rational_string(m) + ": " + w.note;
        failures.push_back(std::move(w));
      }
    } catch (const AtlasError& e) {
      failures.push_back(Witness{{}, {}, {}, "margin " + rational_string(m) + ": " + e.what()});
    }
  }
  throw RefineError(RefineError::Kind::Exhaustion,
                    "no tame shrinking found within " + std::to_string(max_iters) + " margins", failures);
}

const char* reduction_style_name(ReductionStyle s) { return s == ReductionStyle::Flag ? "flag" : "top"; }

double NormChoice::weight(int i) const {
  auto it = basic.find(i);
  return it == basic.end() ? 1.0 : it->second;
}

double ReductionContext::radius(double k) const { return std::exp2(-k) * delta; }

double ReductionContext::eta(double k) const { return std::exp2(-k) * (1.0 - std::exp2(-0.25)) * delta; }

double ReductionContext::dist_V(const IndexSet& J, const Vec& x) const {
  auto it = V.find(J);
  if (it == V.end()) return kInf;
  return min_box_distance(it->second, x);
}

bool ReductionContext::in_C(const IndexSet& J, const Vec& x) const {
  auto it = C.find(J);
  if (it == C.end()) return false;
  for (const auto& b : it->second)
    if (b.inner_depth(x) > 0) return true;
  return false;
}

double ReductionContext::C_tilde_depth(const IndexSet& J, const Vec& x) const {
  double best = -kInf;
  auto own = C.find(J);
  if (own != C.end())
    for (const auto& b : own->second) best = std::max(best, b.inner_depth(x));
  for (const auto& K : atlas->higher(J)) {
    auto it = C.find(K);
    if (it == C.end() || it->second.empty()) continue;
    const auto& ch = atlas->change(J, K);
    int br = ch.branch_at(x);
    if (br < 0) continue;
    Vec w = ch.apply_branch(br, x);
    const double lip = std::max(1e-12, ch.jacobian_branch(br, x).norm());
    double dk = -kInf;
    for (const auto& b : it->second) dk = std::max(dk, b.inner_depth(w));
    best = std::max(best, std::min(dk / lip, ch.branches()[br].domain.inner_depth(x)));
  }
  return best;
}

bool ReductionContext::in_C_tilde(const IndexSet& J, const Vec& x) const { return C_tilde_depth(J, x) > 0; }

double ReductionContext::core_distance(double k, const IndexSet& J, const IndexSet& I, const Vec& x) const {
  if (!atlas->has_change(I, J)) return kInf;
  auto it = V.find(I);
  if (it == V.end() || it->second.empty()) return kInf;
  const auto& ch = atlas->change(I, J);
  auto p = ch.project(x);
  if (!p) return kInf;
  const double r = radius(k);
  Vec w = ch.apply_branch(p->branch, p->y);
  const double perp = (w - x).norm();
  double gap = std::max({0.0, dist_V(I, p->y) - r, dist_V(J, w) - r,
                         ch.branches()[p->branch].domain.outside_distance(p->y)});
  return std::sqrt(perp * perp + gap * gap);
}

bool ReductionContext::in_core(double k, const IndexSet& J, const IndexSet& I, const Vec& x) const {
  if (!atlas->has_change(I, J)) return false;
  const auto& ch = atlas->change(I, J);
  auto p = ch.project(x);
  if (!p || !p->inside) return false;
  const double r = radius(k);
  Vec w = ch.apply_branch(p->branch, p->y);
  return (w - x).norm() < id_tol && dist_V(I, p->y) < r && dist_V(J, x) < r;
}

const Mat& ReductionContext::block_inverse(const IndexSet& J) const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto key = std::make_pair(atlas.get(), J);
  auto it = cache_->inv.find(key);
  if (it == cache_->inv.end()) {
    const int mJ = atlas->chart(J).obstruction_dim;
    Mat B(mJ, 0);
    for (int i : J) {
      Mat h = atlas->change({i}, J).hat_phi_d();
      Mat nb(mJ, B.cols() + h.cols());
      if (B.cols()) nb.leftCols(B.cols()) = B;
      if (h.cols()) nb.rightCols(h.cols()) = h;
      B = nb;
    }
    Mat inv = B.rows() == B.cols() && B.rows() > 0 ? Mat(B.inverse()) : Mat(B.completeOrthogonalDecomposition().pseudoInverse());
    it = cache_->inv.emplace(key, inv).first;
  }
  return it->second;
}

std::vector<Vec> ReductionContext::components(const IndexSet& J, const Vec& e) const {
  if (J.size() == 1) return {e};
  const Mat& inv = block_inverse(J);
  Vec c = inv.rows() ? Vec(inv * e) : Vec(0);
  std::vector<Vec> out;
  int off = 0;
  for (int i : J) {
    int m = atlas->chart({i}).obstruction_dim;
    out.push_back(c.segment(off, m));
    off += m;
  }
  return out;
}

double ReductionContext::norm(const IndexSet& J, const Vec& e) const {
  if (e.size() == 0) return 0.0;
  auto comp = components(J, e);
  double m = 0.0;
  for (std::size_t a = 0; a < J.size(); ++a)
    if (comp[a].size()) m = std::max(m, norms.weight(J[a]) * comp[a].norm());
  return norms.scale * m;
}

double ReductionContext::norm_bound(const IndexSet& J) const {
  const int mJ = atlas->chart(J).obstruction_dim;
  if (mJ == 0) return 0.0;
  double w = 0.0;
  for (int i : J) w = std::max(w, norms.weight(i));
  double binv = 1.0;
  if (J.size() > 1) {
    Eigen::JacobiSVD<Mat> svd(block_inverse(J));
    binv = svd.singularValues()[0];
  }
  return norms.scale * w * binv;
}

Box ReductionContext::V_hull(const IndexSet& J) const {
  auto it = V.find(J);
  const int n = atlas->chart(J).dim();
  if (it == V.end() || it->second.empty()) return Box(std::vector<Rational>(n, 1), std::vector<Rational>(n, 0));
  Box h = it->second.front();
  for (const auto& b : it->second)
    for (int k = 0; k < n; ++k) {
      h.lo[k] = std::min(h.lo[k], b.lo[k]);
      h.hi[k] = std::max(h.hi[k], b.hi[k]);
    }
  return Box(h.lo, h.hi);
}

Json ReductionContext::to_json() const {
  Json j;
  j["style"] = reduction_style_name(style);
  j["V"] = boxes_json(V);
  j["C"] = boxes_json(C);
  j["delta"] = number_json(delta);
  j["delta_V"] = number_json(delta_V);
  j["sigma"] = number_json(sigma);
  j["sigma_sampled_min"] = number_json(sigma_bound.sampled_min);
  j["sigma_slack"] = number_json(sigma_bound.slack);
  Json n;
  n["scale"] = number_json(norms.scale);
  Json b = Json::object();
  for (const auto& [i, c] : norms.basic) b[std::to_string(i)] = number_json(c);
  n["basic"] = b;
  j["norms"] = n;
  return j;
}

DeltaParts compute_delta_V(const Atlas& atlas, const std::map<IndexSet, std::vector<Box>>& V, const CheckOptions& opt) {
  DeltaParts out;
  out.margin = kInf;
  for (const auto& [I, boxes] : V)
    for (const auto& b : boxes) out.margin = std::min(out.margin, box_depth(atlas.chart(I).domain, b));
  out.separation = 1.0;
  std::vector<IndexSet> keys;
  for (const auto& [I, boxes] : V)
    if (!boxes.empty()) keys.push_back(I);
  for (std::size_t a = 0; a < keys.size(); ++a)
    for (std::size_t b = a + 1; b < keys.size(); ++b) {
      const IndexSet &I = keys[a], &J = keys[b];
      if (comparable(I, J)) continue;
      const IndexSet IJ = set_union(I, J);
      for (const auto& L : atlas.index_sets)
        if (is_subset(IJ, L))
          out.separation = std::min(out.separation, image_distance(atlas, I, V.at(I), J, V.at(J), L, opt.density));
    }
  out.delta_V = std::min({0.25, out.margin / 2.0, out.separation / 4.0});
  return out;
}

ReductionContext build_reduction(const Atlas& atlas, const ReductionOptions& opt) {
  if (atlas.dimension != 0)
    throw RefineError(RefineError::Kind::Coverage, "reductions are built for zero-dimensional atlases only");
  CloudOptions co;
  co.density = opt.check.density;
  co.seed = opt.check.seed;
  co.tol = opt.check.tol;
  RealizationCloud cloud = build_cloud(atlas, co);
  auto zs = zero_set_X(atlas, cloud, true, opt.check.tol);

  ReductionContext ctx;
  ctx.atlas = std::make_shared<const Atlas>(atlas);
  ctx.style = opt.style;
  ctx.id_tol = opt.check.tol.id;
  for (const auto& I : atlas.index_sets) ctx.V[I] = {};

  for (std::size_t a = 0; a < zs.size(); ++a) {
    const ZeroClass& z = zs[a];
    std::map<IndexSet, Vec> rep;
    for (std::size_t i : z.members) rep.emplace(cloud.points[i].chart, cloud.points[i].x);
    std::vector<IndexSet> charts = z.charts;
    std::sort(charts.begin(), charts.end(), size_lex_less);
    if (!rep.count(z.top))
      throw RefineError(RefineError::Kind::Coverage, "zero class is not represented in its top chart " + to_string(z.top));
    std::vector<IndexSet> chain;
    if (opt.style == ReductionStyle::Top) {
      chain = {z.top};
    } else {
      chain = {charts.front()};
      while (chain.back() != z.top) {
        auto next = std::find_if(charts.begin(), charts.end(),
                                 [&](const IndexSet& K) { return is_proper_subset(chain.back(), K); });
        if (next == charts.end()) break;
        chain.push_back(*next);
      }
    }
    double sep = 1.0;
    for (std::size_t b = 0; b < zs.size(); ++b)
      if (b != a) sep = std::min(sep, class_distance(atlas, cloud, z.id, zs[b].id));
    double rho = std::min(0.25, sep / 8.0);
    for (const auto& K : chain) {
      const Domain& U = atlas.chart(K).domain;
      const Vec& x = rep.at(K);
      if (x.size() == 0) continue;
      rho = std::min(rho, 0.45 * U.inner_depth(x));
    }
    if (!(rho > 0))
      throw RefineError(RefineError::Kind::Coverage, "zero class " + std::to_string(z.id) + " touches a chart boundary");
    for (const auto& K : chain) {
      const Vec& x = rep.at(K);
      double r = rho;
      Box b = Box::around(x, r);
      for (int tries = 0; tries < 30 && box_depth(atlas.chart(K).domain, b) <= 0.0 && x.size() > 0; ++tries) {
        r /= 2;
        b = Box::around(x, r);
      }
      ctx.V[K].push_back(b);
    }
  }
  return ctx;
}

void build_nested(ReductionContext& ctx, const CheckOptions& opt, double delta_override) {
  ctx.C.clear();
  for (const auto& [I, boxes] : ctx.V) {
    auto& out = ctx.C[I];
    for (const auto& b : boxes) {
      std::vector<Rational> lo(b.dim()), hi(b.dim());
      for (int k = 0; k < b.dim(); ++k) {
        Rational c = (b.lo[k] + b.hi[k]) / 2, h = (b.hi[k] - b.lo[k]) / 4;
        lo[k] = c - h;
        hi[k] = c + h;
      }
      out.emplace_back(lo, hi);
    }
  }
  DeltaParts dp = compute_delta_V(*ctx.atlas, ctx.V, opt);
  if (!(dp.delta_V > 0))
    throw RefineError(RefineError::Kind::Separation, "no admissible delta: margin " + std::to_string(dp.margin) +
                                                         ", separation " + std::to_string(dp.separation));
  ctx.delta_V = dp.delta_V;
  if (delta_override > 0) {
    if (delta_override >= dp.delta_V)
      throw RefineError(RefineError::Kind::Separation, "delta override is not below delta_V");
    ctx.delta = delta_override;
  } else {
    ctx.delta = dp.delta_V / 2.0;
  }
}

ReductionContext make_context(const Atlas& atlas, std::map<IndexSet, std::vector<Box>> V,
                              std::map<IndexSet, std::vector<Box>> C, const CheckOptions& opt, double delta_override) {
  ReductionContext ctx;
  ctx.atlas = std::make_shared<const Atlas>(atlas);
  ctx.id_tol = opt.tol.id;
  for (const auto& I : atlas.index_sets) {
    ctx.V[I];
    ctx.C[I];
  }
  for (auto& [I, b] : V) ctx.V[I] = std::move(b);
  for (auto& [I, b] : C) ctx.C[I] = std::move(b);
  DeltaParts dp = compute_delta_V(atlas, ctx.V, opt);
  if (!(dp.delta_V > 0)) throw RefineError(RefineError::Kind::Separation, "no admissible delta");
  ctx.delta_V = dp.delta_V;
  ctx.delta = delta_override > 0 ? delta_override : dp.delta_V / 2.0;
  return ctx;
}

namespace {

constexpr double kSigmaGridCap = 2e6;

int grid_per_axis(int density, int n) {
  if (n <= 1) return 8 * density;
  if (n == 2) return 4 * density;
  return 2 * density;
}

}  // namespace

SigmaBound compute_sigma(const ReductionContext& ctx, const CheckOptions& opt) {
  SigmaBound best;
  best.value = kInf;
  best.sampled_min = kInf;
  const Atlas& atlas = *ctx.atlas;
  for (const auto& J : atlas.index_sets) {
    auto vit = ctx.V.find(J);
    if (vit == ctx.V.end() || vit->second.empty()) continue;
    const Chart& c = atlas.chart(J);
    const int n = c.dim();
    const double k = static_cast<double>(J.size());
    const double r = ctx.radius(k);
    const auto lower = atlas.lower(J);
    const double eta = ctx.eta(k - 0.5);
    for (const auto& vb : vit->second) {
      const Box region = vb.expanded(r);
      const double L = ctx.norm_bound(J) * section_lipschitz(c.section, region, 0.0);
      // refine the grid until the Lipschitz slack is at most half the sampled minimum
      for (int P = grid_per_axis(opt.density, n);; P *= 2) {
        const double hh = n ? 0.5 * (region.widths() / P).norm() : 0.0;
        auto pts = sample_box(region, P, 0, 0.0);
        auto vals = parallel_map<double>(pts.size(), [&](std::size_t i) {
          const Vec& x = pts[i];
          if (ctx.dist_V(J, x) > r + hh) return kInf;
          if (ctx.C_tilde_depth(J, x) >= hh) return kInf;
          for (const auto& I : lower)
            if (ctx.core_distance(k - 0.25, J, I, x) + hh < eta) return kInf;
          return ctx.norm(J, c.section.eval(x));
        });
        std::size_t arg = 0;
        double m = kInf;
        for (std::size_t i = 0; i < vals.size(); ++i)
          if (vals[i] < m) {
            m = vals[i];
            arg = i;
          }
        if (!std::isfinite(m)) break;
        const double value = m - L * hh;
        const bool coarse = value < 0.5 * m && std::pow(2.0 * P, n) <= kSigmaGridCap;
        if (coarse) continue;
        if (value < best.value) {
          best.value = value;
          best.sampled_min = m;
          best.slack = 2.0 * L * hh;
          best.chart = J;
          best.point = pts[arg];
        }
        break;
      }
    }
  }
  if (!std::isfinite(best.value))
    throw RefineError(RefineError::Kind::Sigma, "the probed region is empty; sigma is unbounded");
  if (!(best.value > 0))
    throw RefineError(RefineError::Kind::Sigma, "sigma bound is not positive",
                      {Witness{{best.chart}, {best.point}, {best.value}, "section nearly vanishes outside the cores"}});
  return best;
}

double level_inclusion_margin(const ReductionContext& ctx, double k) {
  return ctx.radius(k) - ctx.eta(k) - ctx.radius(k + 0.5);
}

Verdict check_reduction(const ReductionContext& ctx, const CheckOptions& opt) {
  Verdict v;
  v.check = "reduction";
  v.tolerance = opt.tol.id;
  const Atlas& atlas = *ctx.atlas;
  // C ⋐ V ⋐ U with positive margins
  for (const auto& [I, boxes] : ctx.V) {
    for (const auto& b : boxes) {
      const double d = box_depth(atlas.chart(I).domain, b);
      v.observe(d);
      if (!(d > 0)) v.fail(Witness{{I}, {b.center()}, {d}, "V_I is not compactly contained in U_I"});
      if (!(2 * ctx.delta < d)) v.fail(Witness{{I}, {b.center()}, {d}, "B_2delta(V_I) leaves U_I"});
    }
    auto cit = ctx.C.find(I);
    if (cit == ctx.C.end()) continue;
    for (const auto& cb : cit->second) {
      double best = -kInf;
      for (const auto& b : boxes) {
        double d = kInf;
        for (int k = 0; k < b.dim(); ++k) d = std::min({d, Rational(cb.lo[k] - b.lo[k]).get_d(), Rational(b.hi[k] - cb.hi[k]).get_d()});
        best = std::max(best, b.dim() ? d : 1.0);
      }
      if (!(best > 0)) v.fail(Witness{{I}, {cb.center()}, {best}, "C_I is not compactly contained in V_I"});
    }
  }
  // coverage of the zero set by pi(C)
  CloudOptions co;
  co.density = opt.density;
  co.seed = opt.seed;
  co.tol = opt.tol;
  RealizationCloud cloud = build_cloud(atlas, co);
  auto zs = zero_set_X(atlas, cloud, true, opt.tol);
  for (const auto& z : zs) {
    bool covered = false;
    for (std::size_t i : z.members) {
      const auto& p = cloud.points[i];
      if (ctx.in_C(p.chart, p.x) || (p.x.size() == 0 && !ctx.C.at(p.chart).empty())) covered = true;
    }
    if (!covered) {
      const auto& p = cloud.points[z.members.front()];
      v.fail(Witness{{p.chart}, {p.x}, {}, "zero class not covered by pi(C)"});
    }
  }
  DeltaParts dp = compute_delta_V(atlas, ctx.V, opt);
  v.details["margin"] = number_json(dp.margin);
  v.details["separation"] = number_json(dp.separation);
  v.details["delta_V"] = number_json(dp.delta_V);
  v.details["zero_classes"] = zs.size();
  if (!(dp.separation > 0)) v.fail(Witness{{}, {}, {dp.separation}, "images of incomparable V_I meet"});
  if (!(ctx.delta < ctx.delta_V)) v.fail(Witness{{}, {}, {ctx.delta}, "delta is not below delta_V"});
  return v;
}

Verdict check_level_sets(const ReductionContext& ctx, const CheckOptions& opt) {
  Verdict v;
  v.check = "level_sets";
  v.tolerance = opt.tol.id;
  const Atlas& atlas = *ctx.atlas;
  const int M = atlas.max_level();
  for (int q = 0; q <= 4 * M; ++q) {
    const double k = q / 4.0;
    const double m = level_inclusion_margin(ctx, k);
    v.observe(m);
    if (!(m > 0)) v.fail(Witness{{}, {}, {m}, "B_eta_k(V^{k+1/2}) is not inside V^k at k=" + std::to_string(k)});
  }
  const double eta0 = ctx.eta(0);
  for (const auto& [key, ch] : atlas.changes) {
    const auto& [I, J] = key;
    if (ctx.V.at(I).empty()) continue;
    for (int q = 0; q < 4 * M; ++q) {
      const double k = q / 4.0;
      const Box hull = ctx.V_hull(I).expanded(ctx.radius(k));
      auto pts = sample_box(hull, std::max(4, opt.density / 2), hash_index_set(J, opt.seed + q), 0.25);
      auto bad = parallel_map<char>(pts.size(), [&](std::size_t i) -> char {
        int br = ch.branch_at(pts[i]);
        if (br < 0) return 0;
        Vec x = ch.apply_branch(br, pts[i]);
        if (ctx.core_distance(k + 0.75, J, I, x) < std::exp2(-k - 0.5) * eta0 - opt.tol.id)
          return ctx.core_distance(k + 0.5, J, I, x) > opt.tol.id;
        return 0;
      });
      for (std::size_t i = 0; i < pts.size(); ++i)
        if (bad[i]) {
          v.fail(Witness{{I, J}, {pts[i]}, {k}, "im phi ∩ B(N^{k+3/4}) not inside N^{k+1/2}"});
          break;
        }
    }
  }
  return v;
}

ReductionContext reduction_from_json(const Atlas& atlas, const Json& j) {
  ReductionContext ctx;
  ctx.atlas = std::make_shared<const Atlas>(atlas);
  ctx.style = j.at("style").get<std::string>() == "top" ? ReductionStyle::Top : ReductionStyle::Flag;
  for (const auto& I : atlas.index_sets) {
    ctx.V[I];
    ctx.C[I];
  }
  for (auto& [I, b] : boxes_from_json(j.at("V"))) ctx.V[I] = b;
  for (auto& [I, b] : boxes_from_json(j.at("C"))) ctx.C[I] = b;
  auto num = [](const Json& x) { return x.is_string() ? std::stod(x.get<std::string>()) : x.get<double>(); };
  ctx.delta = num(j.at("delta"));
  ctx.delta_V = num(j.at("delta_V"));
  ctx.sigma = num(j.at("sigma"));
  ctx.sigma_bound.value = ctx.sigma;
  ctx.sigma_bound.sampled_min = num(j.at("sigma_sampled_min"));
  ctx.sigma_bound.slack = num(j.at("sigma_slack"));
  ctx.norms.scale = num(j.at("norms").at("scale"));
  for (auto& [k, c] : j.at("norms").at("basic").items()) ctx.norms.basic[std::stoi(k)] = num(c);
  return ctx;
}

}  // namespace kuranishi
