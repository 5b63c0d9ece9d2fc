#include "kuranishi/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kuranishi {

const char* declared_kind_name(DeclaredKind k) {
  switch (k) {
    case DeclaredKind::Weak: return "weak";
    case DeclaredKind::Standard: return "standard";
    case DeclaredKind::Strong: return "strong";
    case DeclaredKind::Tame: return "tame";
  }
  return "weak";
}

DeclaredKind parse_declared_kind(const std::string& s) {
  if (s == "weak") return DeclaredKind::Weak;
  if (s == "standard") return DeclaredKind::Standard;
  if (s == "strong") return DeclaredKind::Strong;
  if (s == "tame") return DeclaredKind::Tame;
  throw AtlasError(AtlasError::Kind::Schema, "unknown atlas kind '" + s + "'");
}

CoordinateChange::CoordinateChange(IndexSet source, IndexSet target, std::vector<ChangeBranch> branches,
                                   RationalMatrix hat_phi, int source_dim, int target_dim)
    : source_(std::move(source)), target_(std::move(target)), branches_(std::move(branches)), hat_(std::move(hat_phi)) {
  hat_d_ = hat_.to_double();
  src_dim_ = source_dim >= 0 ? source_dim : (branches_.empty() ? 0 : branches_[0].phi.domain_dim());
  tgt_dim_ = target_dim >= 0 ? target_dim : (branches_.empty() ? 0 : branches_[0].phi.codomain_dim());
  for (const auto& b : branches_) {
    if (b.phi.domain_dim() != src_dim_ || b.phi.codomain_dim() != tgt_dim_ || b.domain.dim() != src_dim_)
      throw AtlasError(AtlasError::Kind::Dimension,
                       "change " + to_string(source_) + "->" + to_string(target_) + ": branch shape mismatch");
    AffineCache c;
    if (b.phi.is_affine()) {
      c.affine = true;
      c.A = b.phi.linear_part().to_double();
      std::vector<Rational> t = b.phi.translation();
      c.b.resize(static_cast<int>(t.size()));
      for (std::size_t k = 0; k < t.size(); ++k) c.b[static_cast<int>(k)] = t[k].get_d();
      c.pinv = c.A.size() == 0 ? Mat(Mat::Zero(c.A.cols(), c.A.rows())) : Mat(c.A.completeOrthogonalDecomposition().pseudoInverse());
    }
    affine_.push_back(std::move(c));
  }
}

Domain CoordinateChange::domain() const {
  std::vector<DomainPiece> p;
  for (const auto& b : branches_) p.insert(p.end(), b.domain.pieces().begin(), b.domain.pieces().end());
  return Domain(src_dim_, std::move(p));
}

int CoordinateChange::branch_at(const Vec& x) const {
  for (std::size_t b = 0; b < branches_.size(); ++b)
    if (branches_[b].domain.contains(x)) return static_cast<int>(b);
  return -1;
}

std::optional<Vec> CoordinateChange::apply(const Vec& x) const {
  int b = branch_at(x);
  if (b < 0) return std::nullopt;
  return apply_branch(b, x);
}

Vec CoordinateChange::apply_branch(int b, const Vec& x) const {
  const auto& c = affine_[b];
  if (c.affine) return c.A * x + c.b;
  return branches_[b].phi.eval(x);
}

Mat CoordinateChange::jacobian_branch(int b, const Vec& x) const {
  if (affine_[b].affine) return affine_[b].A;
  return branches_[b].phi.jacobian(x);
}

Preimage CoordinateChange::project_branch(int b, const Vec& x) const {
  Preimage out;
  out.branch = b;
  const auto& c = affine_[b];
  if (c.affine) {
    out.y = c.pinv * (x - c.b);
    out.residual = (c.A * out.y + c.b - x).norm();
    out.inside = branches_[b].domain.contains(out.y);
    return out;
  }
  const SmoothMap& phi = branches_[b].phi;
  // seeds: a coarse grid over each piece, best residual first
  std::vector<Vec> seeds;
  for (const auto& piece : branches_[b].domain.pieces()) {
    auto grid = sample_box(piece.box, src_dim_ <= 1 ? 9 : (src_dim_ == 2 ? 4 : 3), 0, 0.0);
    for (auto& g : grid) seeds.push_back(std::move(g));
  }
  std::sort(seeds.begin(), seeds.end(), [&](const Vec& a, const Vec& bb) {
    double ra = (phi.eval(a) - x).norm(), rb = (phi.eval(bb) - x).norm();
    if (ra != rb) return ra < rb;
    return std::lexicographical_compare(a.data(), a.data() + a.size(), bb.data(), bb.data() + bb.size());
  });
  if (seeds.size() > 3) seeds.resize(3);
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& s : seeds) {
    Vec y = s;
    double r = (phi.eval(y) - x).norm();
    for (int it = 0; it < 60 && r > 1e-15; ++it) {
      Mat J = phi.jacobian(y);
      Vec res = phi.eval(y) - x;
      Vec step = J.completeOrthogonalDecomposition().solve(res);
      double t = 1.0;
      bool improved = false;
      for (int h = 0; h < 30; ++h) {
        Vec yn = y - t * step;
        double rn = (phi.eval(yn) - x).norm();
        if (rn < r) {
          y = yn;
          r = rn;
          improved = true;
          break;
        }
        t *= 0.5;
      }
      if (!improved || step.norm() < 1e-16) break;
    }
    bool inside = branches_[b].domain.contains(y);
    // prefer candidates inside the branch domain, then smaller residual
    double key = r + (inside ? 0.0 : 1.0);
    if (key < best) {
      best = key;
      out.y = y;
      out.residual = r;
      out.inside = inside;
    }
  }
  return out;
}

std::optional<Preimage> CoordinateChange::project(const Vec& x) const {
  std::optional<Preimage> best;
  double best_key = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < branches_.size(); ++b) {
    Preimage p = project_branch(static_cast<int>(b), x);
    double key = p.residual + (p.inside ? 0.0 : 1.0 + branches_[b].domain.outside_distance(p.y));
    if (key < best_key) {
      best_key = key;
      best = p;
    }
  }
  return best;
}

std::optional<Vec> CoordinateChange::invert(const Vec& x, double tol) const {
  for (std::size_t b = 0; b < branches_.size(); ++b) {
    Preimage p = project_branch(static_cast<int>(b), x);
    if (p.inside && p.residual < tol) return p.y;
  }
  return std::nullopt;
}

const Chart& Atlas::chart(const IndexSet& I) const {
  auto it = charts.find(I);
  if (it == charts.end()) throw AtlasError(AtlasError::Kind::Schema, "no chart " + to_string(I));
  return it->second;
}

const CoordinateChange& Atlas::change(const IndexSet& I, const IndexSet& J) const {
  auto it = changes.find({I, J});
  if (it == changes.end()) throw AtlasError(AtlasError::Kind::Schema, "no change " + to_string(I) + "->" + to_string(J));
  return it->second;
}

OrientationFrame Atlas::frame(const IndexSet& I) const {
  auto it = orientation.find(I);
  if (it != orientation.end()) return it->second;
  const Chart& c = chart(I);
  return OrientationFrame{I, RationalMatrix::identity(c.dim()), RationalMatrix::identity(c.obstruction_dim), 1};
}

std::vector<IndexSet> Atlas::lower(const IndexSet& J) const {
  std::vector<IndexSet> out;
  for (const auto& I : index_sets)
    if (is_proper_subset(I, J)) out.push_back(I);
  return out;
}

std::vector<IndexSet> Atlas::higher(const IndexSet& I) const {
  std::vector<IndexSet> out;
  for (const auto& J : index_sets)
    if (is_proper_subset(I, J)) out.push_back(J);
  return out;
}

int Atlas::max_level() const {
  int m = 0;
  for (const auto& I : index_sets) m = std::max(m, static_cast<int>(I.size()));
  return m;
}

void Atlas::check_structure() const {
  using K = AtlasError::Kind;
  if (basic_count < 1) throw AtlasError(K::Schema, "basic_count must be positive");
  for (int i = 1; i <= basic_count; ++i)
    if (std::find(index_sets.begin(), index_sets.end(), IndexSet{i}) == index_sets.end())
      throw AtlasError(K::Schema, "index poset is missing the singleton {" + std::to_string(i) + "}");
  for (const auto& I : index_sets) {
    if (I.empty()) throw AtlasError(K::Schema, "empty index set");
    if (I.front() < 1 || I.back() > basic_count) throw AtlasError(K::Schema, "index set " + to_string(I) + " out of range");
    const Chart& c = chart(I);
    if (c.dim() - c.obstruction_dim != dimension)
      throw AtlasError(K::Dimension, "chart " + to_string(I) + " has dimension " + std::to_string(c.dim()) + " - " +
                                         std::to_string(c.obstruction_dim) + " != " + std::to_string(dimension));
    if (c.section.domain_dim() != c.dim() || c.section.codomain_dim() != c.obstruction_dim)
      throw AtlasError(K::Dimension, "chart " + to_string(I) + ": section shape mismatch");
    if (c.metric.kind == MetricKind::Pullback && !has_change(I, c.metric.target))
      throw AtlasError(K::Schema, "chart " + to_string(I) + ": pullback metric needs a change into " +
                                      to_string(c.metric.target));
  }
  if (charts.size() != index_sets.size()) throw AtlasError(K::Schema, "charts do not match the index poset");
  for (const auto& I : index_sets)
    for (const auto& J : index_sets)
      if (is_proper_subset(I, J) && !has_change(I, J))
        throw AtlasError(K::Schema, "missing coordinate change " + to_string(I) + "->" + to_string(J));
  for (const auto& [key, ch] : changes) {
    const auto& [I, J] = key;
    if (!has_chart(I) || !has_chart(J) || !is_proper_subset(I, J))
      throw AtlasError(K::Schema, "change " + to_string(I) + "->" + to_string(J) + " does not match the poset");
    const Chart &ci = chart(I), &cj = chart(J);
    if (ch.hat_phi().rows() != cj.obstruction_dim || ch.hat_phi().cols() != ci.obstruction_dim)
      throw AtlasError(K::Dimension, "change " + to_string(I) + "->" + to_string(J) + ": hat_phi shape");
    if (ch.hat_phi().rank() != ci.obstruction_dim)
      throw AtlasError(K::Rank, "change " + to_string(I) + "->" + to_string(J) + ": hat_phi is not injective");
    if (ch.source_dim() != ci.dim() || ch.target_dim() != cj.dim())
      throw AtlasError(K::Dimension, "change " + to_string(I) + "->" + to_string(J) + ": dimension mismatch");
    for (const auto& b : ch.branches())
      if (b.phi.domain_dim() != ci.dim() || b.phi.codomain_dim() != cj.dim())
        throw AtlasError(K::Dimension, "change " + to_string(I) + "->" + to_string(J) + ": phi shape");
  }
  for (const auto& [I, f] : orientation) {
    const Chart& c = chart(I);
    if (f.domain_frame.rows() != c.dim() || f.domain_frame.cols() != c.dim() || f.domain_frame.rank() != c.dim())
      throw AtlasError(K::Rank, "orientation of " + to_string(I) + ": domain frame is not a basis");
    if (f.obstruction_frame.rows() != c.obstruction_dim || f.obstruction_frame.cols() != c.obstruction_dim ||
        f.obstruction_frame.rank() != c.obstruction_dim)
      throw AtlasError(K::Rank, "orientation of " + to_string(I) + ": obstruction frame is not a basis");
    if (f.sign != 1 && f.sign != -1) throw AtlasError(K::Schema, "orientation sign must be +1 or -1");
  }
}

namespace {

bool box_inside(const Box& inner, const Box& outer, bool strict) {
  for (int k = 0; k < inner.dim(); ++k) {
    if (strict ? !(outer.lo[k] < inner.lo[k] && inner.hi[k] < outer.hi[k])
               : !(outer.lo[k] <= inner.lo[k] && inner.hi[k] <= outer.hi[k]))
      return false;
  }
  return true;
}

// Containment of sub in dom: exact for constraint-free boxes, sampled otherwise.
bool contained(const Domain& sub, const Domain& dom, bool closure) {
  for (const auto& p : sub.pieces()) {
    bool exact = false;
    for (const auto& q : dom.pieces())
      if (q.constraints.empty() && box_inside(p.box, q.box, closure)) exact = true;
    if (exact) continue;
    Domain piece(sub.dim(), {p});
    auto pts = sample_domain(piece, sub.dim() <= 2 ? 24 : 8, 7);
    if (closure) {
      // corners and face points of the closed box, filtered by the closed constraints
      auto shell = sample_box(p.box, sub.dim() <= 2 ? 24 : 8, 11, 0.0);
      for (auto& x : shell)
        for (int k = 0; k < x.size(); ++k) {
          Vec a = x, b = x;
          a[k] = p.box.lo_d[k];
          b[k] = p.box.hi_d[k];
          pts.push_back(a);
          pts.push_back(b);
        }
    }
    for (const auto& x : pts) {
      bool in_closure = true;
      for (const auto& c : p.constraints)
        if (c.eval(x) < 0) in_closure = false;
      if (in_closure && !dom.contains(x)) return false;
    }
  }
  return true;
}

}  // namespace

Chart restrict_chart(const Chart& chart, const Domain& sub) {
  if (sub.dim() != chart.dim()) throw AtlasError(AtlasError::Kind::Dimension, "restriction dimension mismatch");
  if (!contained(sub, chart.domain, false))
    throw AtlasError(AtlasError::Kind::Containment, "restriction domain is not contained in U_" + to_string(chart.index));
  Chart c = chart;
  c.domain = sub;
  return c;
}

CoordinateChange compose_changes(const CoordinateChange& ij, const CoordinateChange& jk) {
  if (ij.target() != jk.source() || !is_proper_subset(ij.source(), ij.target()) ||
      !is_proper_subset(jk.source(), jk.target()))
    throw AtlasError(AtlasError::Kind::Chain, "changes " + to_string(ij.source()) + "->" + to_string(ij.target()) +
                                                  " and " + to_string(jk.source()) + "->" + to_string(jk.target()) +
                                                  " do not chain");
  std::vector<ChangeBranch> out;
  for (const auto& a : ij.branches())
    for (const auto& b : jk.branches()) {
      Domain d = a.domain.pullback_within(a.phi, b.domain);
      if (d.empty()) continue;
      out.push_back(ChangeBranch{d, b.phi.compose(a.phi)});
    }
  return CoordinateChange(ij.source(), jk.target(), std::move(out), jk.hat_phi() * ij.hat_phi(), ij.source_dim(),
                          jk.target_dim());
}

Atlas shrink(const Atlas& atlas, const std::map<IndexSet, Domain>& new_domains) {
  Atlas out = atlas;
  for (const auto& I : atlas.index_sets) {
    auto it = new_domains.find(I);
    if (it == new_domains.end()) continue;
    const Chart& c = atlas.chart(I);
    if (it->second.dim() != c.dim()) throw AtlasError(AtlasError::Kind::Dimension, "shrinking dimension mismatch");
    if (!contained(it->second, c.domain, true))
      throw AtlasError(AtlasError::Kind::Precompact, "U'_" + to_string(I) + " is not precompact in U_" + to_string(I));
    out.charts[I].domain = it->second;
  }
  for (auto& [key, ch] : out.changes) {
    const auto& [I, J] = key;
    const Domain& ui = out.chart(I).domain;
    const Domain& uj = out.chart(J).domain;
    std::vector<ChangeBranch> br;
    for (const auto& b : ch.branches()) {
      Domain d = b.domain.intersect(ui);
      if (b.phi.is_polynomial()) d = d.pullback_within(b.phi, uj);
      else if (!d.empty()) throw AtlasError(AtlasError::Kind::Other, "cannot shrink through a bump-bearing change");
      if (!d.empty()) br.push_back(ChangeBranch{d, b.phi});
    }
    ch = CoordinateChange(I, J, std::move(br), ch.hat_phi(), ch.source_dim(), ch.target_dim());
  }
  return out;
}

Atlas shrink_uniform(const Atlas& atlas, const Rational& margin) {
  std::map<IndexSet, Domain> nd;
  for (const auto& I : atlas.index_sets) nd[I] = atlas.chart(I).domain.shrunk(margin);
  return shrink(atlas, nd);
}

namespace {

SmoothMap product_map(const SmoothMap& phi) {
  std::vector<Polynomial> c{Polynomial::variable(phi.domain_dim() + 1, 0)};
  SmoothMap lifted = phi.with_leading_variable();
  for (const auto& p : lifted.components()) c.push_back(p);
  return SmoothMap(phi.domain_dim() + 1, std::move(c));
}

SmoothMap drop_first_component(const SmoothMap& m) {
  std::vector<Polynomial> c(m.components().begin() + 1, m.components().end());
  std::vector<BumpTerm> bumps = m.bumps();
  for (auto& b : bumps) b.coeff.erase(b.coeff.begin());
  return SmoothMap(m.domain_dim(), std::move(c), std::move(bumps));
}

RationalMatrix block_one(const RationalMatrix& f) {
  RationalMatrix out(f.rows() + 1, f.cols() + 1);
  out(0, 0) = 1;
  for (int r = 0; r < f.rows(); ++r)
    for (int c = 0; c < f.cols(); ++c) out(r + 1, c + 1) = f(r, c);
  return out;
}

}  // namespace

Atlas product_concordance(const Atlas& atlas, const Rational& collar) {
  Atlas out = atlas;
  out.dimension = atlas.dimension + 1;
  out.concordance = true;
  const Rational a = -collar, b = 1 + collar;
  for (auto& [I, c] : out.charts) {
    c.domain = c.domain.with_leading_interval(a, b);
    c.section = c.section.with_leading_variable();
  }
  for (auto& [key, ch] : out.changes) {
    std::vector<ChangeBranch> br;
    for (const auto& bb : ch.branches()) br.push_back(ChangeBranch{bb.domain.with_leading_interval(a, b), product_map(bb.phi)});
    ch = CoordinateChange(key.first, key.second, std::move(br), ch.hat_phi(), ch.source_dim() + 1, ch.target_dim() + 1);
  }
  for (auto& [I, f] : out.orientation) f.domain_frame = block_one(f.domain_frame);
  return out;
}

Atlas slice_concordance(const Atlas& atlas, const Rational& t) {
  if (!atlas.concordance) throw AtlasError(AtlasError::Kind::Other, "slicing requires a concordance");
  Atlas out = atlas;
  out.dimension = atlas.dimension - 1;
  out.concordance = false;
  for (auto& [I, c] : out.charts) {
    c.domain = c.domain.slice_first(t);
    c.section = c.section.fix_first_variable(t);
  }
  for (auto& [key, ch] : out.changes) {
    std::vector<ChangeBranch> br;
    for (const auto& bb : ch.branches()) {
      Domain d = bb.domain.slice_first(t);
      if (d.empty()) continue;
      br.push_back(ChangeBranch{d, drop_first_component(bb.phi.fix_first_variable(t))});
    }
    ch = CoordinateChange(key.first, key.second, std::move(br), ch.hat_phi(), ch.source_dim() - 1, ch.target_dim() - 1);
  }
  for (auto& [I, f] : out.orientation) {
    RationalMatrix d(f.domain_frame.rows() - 1, f.domain_frame.cols() - 1);
    for (int r = 0; r < d.rows(); ++r)
      for (int c = 0; c < d.cols(); ++c) d(r, c) = f.domain_frame(r + 1, c + 1);
    f.domain_frame = d;
  }
  return out;
}

bool same_fields(const Atlas& a, const Atlas& b, std::string* why) {
  auto fail = [&](const std::string& w) {
    if (why) *why = w;
    return false;
  };
  if (a.dimension != b.dimension) return fail("dimension");
  if (a.basic_count != b.basic_count) return fail("basic_count");
  if (a.index_sets != b.index_sets) return fail("index_sets");
  for (const auto& I : a.index_sets) {
    const Chart &x = a.chart(I), &y = b.chart(I);
    if (!(x.domain == y.domain)) return fail("domain of " + to_string(I));
    if (x.obstruction_dim != y.obstruction_dim) return fail("obstruction_dim of " + to_string(I));
    if (!x.section.equals(y.section)) return fail("section of " + to_string(I));
  }
  if (a.changes.size() != b.changes.size()) return fail("change count");
  for (const auto& [key, ch] : a.changes) {
    auto it = b.changes.find(key);
    if (it == b.changes.end()) return fail("missing change");
    const auto& o = it->second;
    if (ch.hat_phi() != o.hat_phi()) return fail("hat_phi " + to_string(key.first) + "->" + to_string(key.second));
    if (ch.branches().size() != o.branches().size()) return fail("branches " + to_string(key.first) + "->" + to_string(key.second));
    for (std::size_t i = 0; i < ch.branches().size(); ++i) {
      if (!(ch.branches()[i].domain == o.branches()[i].domain)) return fail("change domain " + to_string(key.first) + "->" + to_string(key.second));
      if (!ch.branches()[i].phi.equals(o.branches()[i].phi)) return fail("phi " + to_string(key.first) + "->" + to_string(key.second));
    }
  }
  return true;
}

double chart_distance(const Atlas& atlas, const IndexSet& I, const Vec& a, const Vec& b) {
  const Chart& c = atlas.chart(I);
  if (c.metric.kind == MetricKind::Pullback) {
    const CoordinateChange& ch = atlas.change(I, c.metric.target);
    auto pa = ch.apply(a), pb = ch.apply(b);
    if (pa && pb) return (*pa - *pb).norm();
  }
  return (a - b).norm();
}

}  // namespace kuranishi
