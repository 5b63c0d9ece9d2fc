#include "kuranishi/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kuranishi {

namespace {

constexpr double kExactBand = 1e-9;

int compare_exact(double x, const Rational& q) {
  Rational xr(x);
  return cmp(xr, q);
}

}  // namespace

Box::Box(std::vector<Rational> l, std::vector<Rational> h) : lo(std::move(l)), hi(std::move(h)) {
  if (lo.size() != hi.size()) throw AtlasError(AtlasError::Kind::Dimension, "box bound length mismatch");
  lo_d.resize(static_cast<int>(lo.size()));
  hi_d.resize(static_cast<int>(hi.size()));
  for (std::size_t k = 0; k < lo.size(); ++k) {
    lo_d[static_cast<int>(k)] = lo[k].get_d();
    hi_d[static_cast<int>(k)] = hi[k].get_d();
  }
}

Box Box::from_double(const Vec& l, const Vec& h) {
  std::vector<Rational> a, b;
  for (int k = 0; k < l.size(); ++k) {
    a.push_back(to_rational(l[k]));
    b.push_back(to_rational(h[k]));
  }
  return Box(a, b);
}

Box Box::around(const Vec& c, double r) {
  Vec rr = Vec::Constant(c.size(), r);
  return from_double(c - rr, c + rr);
}

bool Box::empty() const {
  for (std::size_t k = 0; k < lo.size(); ++k)
    if (lo[k] >= hi[k]) return true;
  return false;
}

bool Box::contains(const Vec& x) const {
  for (int k = 0; k < x.size(); ++k) {
    double a = x[k] - lo_d[k], b = hi_d[k] - x[k];
    if (a < -kExactBand || b < -kExactBand) return false;
    if (a < kExactBand && compare_exact(x[k], lo[k]) <= 0) return false;
    if (b < kExactBand && compare_exact(x[k], hi[k]) >= 0) return false;
  }
  return true;
}

bool Box::contains_exact(const std::vector<Rational>& x) const {
  for (std::size_t k = 0; k < x.size(); ++k)
    if (!(lo[k] < x[k] && x[k] < hi[k])) return false;
  return true;
}

double Box::inner_depth(const Vec& x) const {
  double d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < x.size(); ++k) d = std::min({d, x[k] - lo_d[k], hi_d[k] - x[k]});
  return d;
}

double Box::distance(const Vec& x) const {
  double s = 0.0;
  for (int k = 0; k < x.size(); ++k) {
    double e = 0.0;
    if (x[k] < lo_d[k]) e = lo_d[k] - x[k];
    else if (x[k] > hi_d[k]) e = x[k] - hi_d[k];
    s += e * e;
  }
  return std::sqrt(s);
}

Vec Box::center() const { return 0.5 * (lo_d + hi_d); }
Vec Box::widths() const { return hi_d - lo_d; }

Box Box::shrunk(const Rational& m) const {
  std::vector<Rational> a, b;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    a.push_back(lo[k] + m);
    b.push_back(hi[k] - m);
  }
  return Box(a, b);
}

Box Box::expanded(double r) const {
  Vec rr = Vec::Constant(lo_d.size(), r);
  return from_double(lo_d - rr, hi_d + rr);
}

Box Box::intersect(const Box& o) const {
  std::vector<Rational> a, b;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    a.push_back(std::max(lo[k], o.lo[k]));
    b.push_back(std::min(hi[k], o.hi[k]));
  }
  return Box(a, b);
}

Domain::Domain(int dim, std::vector<DomainPiece> pieces) : dim_(dim), pieces_(std::move(pieces)) {
  for (const auto& p : pieces_) {
    if (p.box.dim() != dim_) throw AtlasError(AtlasError::Kind::Dimension, "domain piece dimension mismatch");
    for (const auto& c : p.constraints)
      if (c.nvars() != dim_) throw AtlasError(AtlasError::Kind::Dimension, "constraint ring mismatch");
  }
}

Domain Domain::box(const Box& b) { return Domain(b.dim(), {DomainPiece{b, {}}}); }

Domain Domain::boxes(int dim, const std::vector<Box>& bs) {
  std::vector<DomainPiece> p;
  for (const auto& b : bs) p.push_back(DomainPiece{b, {}});
  return Domain(dim, std::move(p));
}

Domain Domain::point() { return Domain(0, {DomainPiece{Box({}, {}), {}}}); }

bool Domain::has_constraints() const {
  for (const auto& p : pieces_)
    if (!p.constraints.empty()) return true;
  return false;
}

int Domain::piece_containing(const Vec& x) const {
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (!p.box.contains(x)) continue;
    bool ok = true;
    for (const auto& c : p.constraints) {
      double v = c.eval(x);
      if (std::fabs(v) < kExactBand) {
        std::vector<Rational> xr;
        for (int k = 0; k < x.size(); ++k) xr.emplace_back(x[k]);
        if (c.eval_exact(xr) <= 0) {
          ok = false;
          break;
        }
      } else if (v <= 0) {
        ok = false;
        break;
      }
    }
    if (ok) return static_cast<int>(i);
  }
  return -1;
}

bool Domain::contains(const Vec& x) const { return piece_containing(x) >= 0; }

bool Domain::contains_exact(const std::vector<Rational>& x) const {
  for (const auto& p : pieces_) {
    if (!p.box.contains_exact(x)) continue;
    bool ok = true;
    for (const auto& c : p.constraints)
      if (c.eval_exact(x) <= 0) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

Box Domain::bounding_box() const {
  if (pieces_.empty()) throw AtlasError(AtlasError::Kind::Other, "bounding box of empty domain");
  std::vector<Rational> lo = pieces_[0].box.lo, hi = pieces_[0].box.hi;
  for (const auto& p : pieces_)
    for (int k = 0; k < dim_; ++k) {
      lo[k] = std::min(lo[k], p.box.lo[k]);
      hi[k] = std::max(hi[k], p.box.hi[k]);
    }
  return Box(lo, hi);
}

double Domain::outside_distance(const Vec& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pieces_) {
    double d = p.box.distance(x);
    for (const auto& c : p.constraints) {
      double v = c.eval(x);
      if (v > 0) continue;
      Vec g(dim_);
      for (int k = 0; k < dim_; ++k) g[k] = c.derivative(k).eval(x);
      double gn = g.norm();
      d = std::max(d, gn > 1e-12 ? -v / gn : 1.0);
    }
    best = std::min(best, d);
  }
  return best;
}

double Domain::inner_depth(const Vec& x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : pieces_) {
    double d = p.box.inner_depth(x);
    for (const auto& c : p.constraints) {
      double v = c.eval(x);
      Vec g(dim_);
      for (int k = 0; k < dim_; ++k) g[k] = c.derivative(k).eval(x);
      double gn = g.norm();
      d = std::min(d, gn > 1e-12 ? v / gn : (v > 0 ? d : -1.0));
    }
    best = std::max(best, d);
  }
  return best;
}

Domain Domain::intersect(const Domain& o) const {
  if (o.dim_ != dim_) throw AtlasError(AtlasError::Kind::Dimension, "intersect dimension mismatch");
  std::vector<DomainPiece> out;
  for (const auto& a : pieces_)
    for (const auto& b : o.pieces_) {
      Box bx = a.box.intersect(b.box);
      if (bx.empty()) continue;
      DomainPiece p{bx, a.constraints};
      p.constraints.insert(p.constraints.end(), b.constraints.begin(), b.constraints.end());
      out.push_back(std::move(p));
    }
  return Domain(dim_, std::move(out)).simplified();
}

Domain Domain::pullback_within(const SmoothMap& phi, const Domain& target) const {
  if (phi.domain_dim() != dim_ || phi.codomain_dim() != target.dim())
    throw AtlasError(AtlasError::Kind::Dimension, "pullback shape mismatch");
  if (!phi.is_polynomial()) throw AtlasError(AtlasError::Kind::Other, "pullback through bump-bearing map");
  std::vector<DomainPiece> out;
  const auto& comps = phi.components();
  for (const auto& a : pieces_)
    for (const auto& b : target.pieces_) {
      DomainPiece p = a;
      for (int k = 0; k < target.dim(); ++k) {
        p.constraints.push_back(comps[k] - Polynomial::constant(dim_, b.box.lo[k]));
        p.constraints.push_back(Polynomial::constant(dim_, b.box.hi[k]) - comps[k]);
      }
      for (const auto& c : b.constraints) p.constraints.push_back(c.substitute(comps));
      out.push_back(std::move(p));
    }
  return Domain(dim_, std::move(out)).simplified();
}

Domain Domain::shrunk(const Rational& m) const {
  std::vector<DomainPiece> out;
  for (const auto& p : pieces_) {
    DomainPiece q{p.box.shrunk(m), {}};
    if (q.box.empty()) continue;
    for (const auto& c : p.constraints) q.constraints.push_back(c - Polynomial::constant(dim_, m));
    out.push_back(std::move(q));
  }
  return Domain(dim_, std::move(out));
}

Domain Domain::with_leading_interval(const Rational& a, const Rational& b) const {
  std::vector<DomainPiece> out;
  std::vector<int> map;
  for (int k = 0; k < dim_; ++k) map.push_back(k + 1);
  for (const auto& p : pieces_) {
    std::vector<Rational> lo{a}, hi{b};
    lo.insert(lo.end(), p.box.lo.begin(), p.box.lo.end());
    hi.insert(hi.end(), p.box.hi.begin(), p.box.hi.end());
    DomainPiece q{Box(lo, hi), {}};
    for (const auto& c : p.constraints) q.constraints.push_back(c.remap(dim_ + 1, map));
    out.push_back(std::move(q));
  }
  return Domain(dim_ + 1, std::move(out));
}

Domain Domain::slice_first(const Rational& t) const {
  std::vector<DomainPiece> out;
  for (const auto& p : pieces_) {
    if (!(p.box.lo[0] < t && t < p.box.hi[0])) continue;
    DomainPiece q{Box(std::vector<Rational>(p.box.lo.begin() + 1, p.box.lo.end()),
                      std::vector<Rational>(p.box.hi.begin() + 1, p.box.hi.end())),
                  {}};
    for (const auto& c : p.constraints) q.constraints.push_back(c.fix_variable(0, t));
    out.push_back(std::move(q));
  }
  return Domain(dim_ - 1, std::move(out)).simplified();
}

Domain Domain::simplified() const {
  std::vector<DomainPiece> out;
  for (const auto& p : pieces_) {
    std::vector<Rational> lo = p.box.lo, hi = p.box.hi;
    std::vector<Polynomial> keep;
    bool dead = false;
    for (const auto& c : p.constraints) {
      if (c.is_constant()) {
        if (c.constant_term() <= 0) dead = true;
        continue;
      }
      if (c.degree() == 1) {
        int var = -1, count = 0;
        Rational a;
        for (int k = 0; k < dim_; ++k) {
          Polynomial::Exponents e(dim_, 0);
          e[k] = 1;
          Rational ck = c.coefficient(e);
          if (ck != 0) {
            var = k;
            a = ck;
            ++count;
          }
        }
        if (count == 1) {
          Rational bound = -c.constant_term() / a;
          if (a > 0) lo[var] = std::max(lo[var], bound);
          else hi[var] = std::min(hi[var], bound);
          continue;
        }
      }
      if (std::find(keep.begin(), keep.end(), c) == keep.end()) keep.push_back(c);
    }
    Box b(lo, hi);
    if (dead || b.empty()) continue;
    DomainPiece q{b, std::move(keep)};
    bool dup = false;
    for (const auto& o : out)
      if (o.box == q.box && o.constraints == q.constraints) dup = true;
    if (!dup) out.push_back(std::move(q));
  }
  return Domain(dim_, std::move(out));
}

bool Domain::operator==(const Domain& o) const {
  if (dim_ != o.dim_ || pieces_.size() != o.pieces_.size()) return false;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (!(pieces_[i].box == o.pieces_[i].box)) return false;
    if (pieces_[i].constraints != o.pieces_[i].constraints) return false;
  }
  return true;
}

std::vector<Vec> sample_box(const Box& b, int density, std::uint64_t seed, double jitter) {
  const int n = b.dim();
  std::vector<Vec> out;
  if (n == 0) {
    out.emplace_back(0);
    return out;
  }
  long total = 1;
  for (int k = 0; k < n; ++k) total *= density;
  out.reserve(static_cast<std::size_t>(total));
  Vec h = b.widths() / density;
  std::vector<int> idx(n, 0);
  for (long cell = 0; cell < total; ++cell) {
    long c = cell;
    for (int k = 0; k < n; ++k) {
      idx[k] = static_cast<int>(c % density);
      c /= density;
    }
    Rng rng(mix64(seed) ^ static_cast<std::uint64_t>(cell));
    Vec x(n);
    for (int k = 0; k < n; ++k) x[k] = b.lo_d[k] + (idx[k] + 0.5 + rng.uniform(-jitter, jitter)) * h[k];
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<Vec> sample_domain(const Domain& D, int density, std::uint64_t seed) {
  if (density < 1) throw AtlasError(AtlasError::Kind::Other, "density must be positive");
  if (D.empty()) throw AtlasError(AtlasError::Kind::Other, "cannot sample an empty domain");
  std::vector<Vec> out;
  for (std::size_t i = 0; i < D.pieces().size(); ++i) {
    auto pts = sample_box(D.pieces()[i].box, density, mix64(seed + 0x9e37 * (i + 1)));
    for (auto& x : pts)
      if (D.contains(x)) out.push_back(std::move(x));
  }
  return out;
}

}  // namespace kuranishi
