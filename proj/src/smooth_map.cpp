#include "kuranishi/smooth_map.hpp"

#include <algorithm>
#include <cmath>

namespace kuranishi {

double bump_profile(double q) {
  if (q >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - q));
}

double bump_profile_derivative(double q) {
  if (q >= 1.0) return 0.0;
  double d = 1.0 - q;
  return -bump_profile(q) / (d * d);
}

Vec BumpTerm::center_d() const {
  Vec c(static_cast<int>(center.size()));
  for (std::size_t k = 0; k < center.size(); ++k) c[static_cast<int>(k)] = center[k].get_d();
  return c;
}

SmoothMap::SmoothMap(int dom, int cod) : dom_(dom), cod_(cod), poly_(cod, Polynomial(dom)) { build_derivatives(); }

SmoothMap::SmoothMap(int dom, std::vector<Polynomial> components, std::vector<BumpTerm> bumps)
    : dom_(dom), cod_(static_cast<int>(components.size())), poly_(std::move(components)), bumps_(std::move(bumps)) {
  for (const auto& p : poly_)
    if (p.nvars() != dom_) throw AtlasError(AtlasError::Kind::Dimension, "component ring mismatch");
  for (const auto& b : bumps_) {
    if (static_cast<int>(b.center.size()) != dom_ || static_cast<int>(b.coeff.size()) != cod_)
      throw AtlasError(AtlasError::Kind::Dimension, "bump term shape mismatch");
    if (b.radius <= 0) throw AtlasError(AtlasError::Kind::Schema, "bump radius must be positive");
    for (const auto& p : b.coeff)
      if (p.nvars() != dom_) throw AtlasError(AtlasError::Kind::Dimension, "bump coefficient ring mismatch");
  }
  build_derivatives();
}

void SmoothMap::build_derivatives() {
  dpoly_.assign(cod_, {});
  for (int i = 0; i < cod_; ++i)
    for (int k = 0; k < dom_; ++k) dpoly_[i].push_back(poly_[i].derivative(k));
}

SmoothMap SmoothMap::identity(int n) {
  std::vector<Polynomial> c;
  for (int k = 0; k < n; ++k) c.push_back(Polynomial::variable(n, k));
  return SmoothMap(n, std::move(c));
}

SmoothMap SmoothMap::parse(const std::vector<std::string>& components, int dom) {
  std::vector<Polynomial> c;
  for (const auto& s : components) c.push_back(Polynomial::parse(s, dom));
  return SmoothMap(dom, std::move(c));
}

SmoothMap SmoothMap::affine(const RationalMatrix& A, const std::vector<Rational>& b) {
  std::vector<Polynomial> c;
  for (int r = 0; r < A.rows(); ++r) {
    Polynomial p = Polynomial::constant(A.cols(), b.at(r));
    for (int k = 0; k < A.cols(); ++k)
      if (A(r, k) != 0) p = p + Polynomial::variable(A.cols(), k).scaled(A(r, k));
    c.push_back(p);
  }
  return SmoothMap(A.cols(), std::move(c));
}

bool SmoothMap::is_affine() const {
  if (!bumps_.empty()) return false;
  for (const auto& p : poly_)
    if (!p.is_affine()) return false;
  return true;
}

Vec SmoothMap::eval(const Vec& x) const {
  Vec y(cod_);
  for (int i = 0; i < cod_; ++i) y[i] = poly_[i].eval(x.data());
  for (const auto& b : bumps_) {
    Vec c = b.center_d();
    double r = b.radius_d();
    double q = (x - c).squaredNorm() / (r * r);
    if (q >= 1.0) continue;
    double w = bump_profile(q);
    for (int i = 0; i < cod_; ++i) y[i] += w * b.coeff[i].eval(x.data());
  }
  return y;
}

Mat SmoothMap::jacobian(const Vec& x) const {
  Mat J(cod_, dom_);
  for (int i = 0; i < cod_; ++i)
    for (int k = 0; k < dom_; ++k) J(i, k) = dpoly_[i][k].eval(x.data());
  for (const auto& b : bumps_) {
    Vec c = b.center_d();
    double r = b.radius_d();
    Vec d = x - c;
    double q = d.squaredNorm() / (r * r);
    if (q >= 1.0) continue;
    double w = bump_profile(q);
    Vec grad = bump_profile_derivative(q) * 2.0 * d / (r * r);
    for (int i = 0; i < cod_; ++i) {
      double ci = b.coeff[i].eval(x.data());
      for (int k = 0; k < dom_; ++k) J(i, k) += grad[k] * ci + w * b.coeff[i].derivative(k).eval(x.data());
    }
  }
  return J;
}

std::vector<Rational> SmoothMap::eval_exact(const std::vector<Rational>& x) const {
  std::vector<Rational> y;
  for (const auto& p : poly_) y.push_back(p.eval_exact(x));
  return y;
}

RationalMatrix SmoothMap::linear_part() const {
  RationalMatrix A(cod_, dom_);
  for (int i = 0; i < cod_; ++i)
    for (int k = 0; k < dom_; ++k) {
      Polynomial::Exponents e(dom_, 0);
      e[k] = 1;
      A(i, k) = poly_[i].coefficient(e);
    }
  return A;
}

std::vector<Rational> SmoothMap::translation() const {
  std::vector<Rational> b;
  for (const auto& p : poly_) b.push_back(p.constant_term());
  return b;
}

SmoothMap SmoothMap::compose(const SmoothMap& inner) const {
  if (inner.cod_ != dom_) throw AtlasError(AtlasError::Kind::Dimension, "composition shape mismatch");
  const int n = inner.dom_;
  std::vector<Polynomial> comps;
  std::vector<BumpTerm> bumps;
  if (inner.is_polynomial()) {
    for (const auto& p : poly_) comps.push_back(p.substitute(inner.poly_));
    if (!bumps_.empty()) {
      // b(g(x)) is again a radial bump only when g is an exact isometry onto its image and dims agree.
      if (!inner.is_affine() || n != dom_)
        throw AtlasError(AtlasError::Kind::Other, "bump composition not representable");
      RationalMatrix A = inner.linear_part();
      if (A.transpose() * A != RationalMatrix::identity(n))
        throw AtlasError(AtlasError::Kind::Other, "bump composition not representable");
      auto t = inner.translation();
      RationalMatrix At = A.transpose();
      for (const auto& b : bumps_) {
        BumpTerm nb;
        nb.radius = b.radius;
        for (int k = 0; k < n; ++k) {
          Rational v = 0;
          for (int j = 0; j < dom_; ++j) v += At(k, j) * (b.center[j] - t[j]);
          nb.center.push_back(v);
        }
        for (const auto& c : b.coeff) nb.coeff.push_back(c.substitute(inner.poly_));
        bumps.push_back(std::move(nb));
      }
    }
    return SmoothMap(n, std::move(comps), std::move(bumps)).normalized();
  }
  // inner has bumps: only affine outer maps are representable.
  if (!is_affine()) throw AtlasError(AtlasError::Kind::Other, "composition with bump-bearing inner map not representable");
  RationalMatrix A = linear_part();
  auto t = translation();
  SmoothMap lin = inner.left_multiply(A);
  std::vector<Polynomial> c = lin.poly_;
  for (int i = 0; i < cod_; ++i) c[i] = c[i] + Polynomial::constant(n, t[i]);
  return SmoothMap(n, std::move(c), lin.bumps_).normalized();
}

SmoothMap SmoothMap::left_multiply(const RationalMatrix& A) const {
  if (A.cols() != cod_) throw AtlasError(AtlasError::Kind::Dimension, "left multiply shape mismatch");
  auto apply = [&](const std::vector<Polynomial>& v) {
    std::vector<Polynomial> out;
    for (int r = 0; r < A.rows(); ++r) {
      Polynomial p(dom_);
      for (int k = 0; k < cod_; ++k)
        if (A(r, k) != 0) p = p + v[k].scaled(A(r, k));
      out.push_back(p);
    }
    return out;
  };
  std::vector<BumpTerm> bumps;
  for (const auto& b : bumps_) {
    BumpTerm nb = b;
    nb.coeff = apply(b.coeff);
    bumps.push_back(std::move(nb));
  }
  return SmoothMap(dom_, apply(poly_), std::move(bumps)).normalized();
}

SmoothMap SmoothMap::operator+(const SmoothMap& o) const {
  if (o.dom_ != dom_ || o.cod_ != cod_) throw AtlasError(AtlasError::Kind::Dimension, "sum shape mismatch");
  std::vector<Polynomial> c;
  for (int i = 0; i < cod_; ++i) c.push_back(poly_[i] + o.poly_[i]);
  std::vector<BumpTerm> b = bumps_;
  b.insert(b.end(), o.bumps_.begin(), o.bumps_.end());
  return SmoothMap(dom_, std::move(c), std::move(b)).normalized();
}

SmoothMap SmoothMap::operator-(const SmoothMap& o) const {
  RationalMatrix neg = RationalMatrix::identity(cod_);
  for (int i = 0; i < cod_; ++i) neg(i, i) = -1;
  return *this + o.left_multiply(neg);
}

SmoothMap SmoothMap::normalized() const {
  std::vector<BumpTerm> merged;
  for (const auto& b : bumps_) {
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const BumpTerm& m) { return m.radius == b.radius && m.center == b.center; });
    if (it == merged.end()) {
      merged.push_back(b);
    } else {
      for (int i = 0; i < cod_; ++i) it->coeff[i] = it->coeff[i] + b.coeff[i];
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const BumpTerm& m) {
                                return std::all_of(m.coeff.begin(), m.coeff.end(),
                                                   [](const Polynomial& p) { return p.is_zero(); });
                              }),
               merged.end());
  std::sort(merged.begin(), merged.end(), [](const BumpTerm& a, const BumpTerm& b) {
    if (a.radius != b.radius) return a.radius < b.radius;
    return a.center < b.center;
  });
  SmoothMap out;
  out.dom_ = dom_;
  out.cod_ = cod_;
  out.poly_ = poly_;
  out.bumps_ = std::move(merged);
  out.build_derivatives();
  return out;
}

bool SmoothMap::equals(const SmoothMap& o) const {
  if (dom_ != o.dom_ || cod_ != o.cod_) return false;
  SmoothMap a = normalized(), b = o.normalized();
  if (a.poly_ != b.poly_ || a.bumps_.size() != b.bumps_.size()) return false;
  for (std::size_t k = 0; k < a.bumps_.size(); ++k) {
    const auto &x = a.bumps_[k], &y = b.bumps_[k];
    if (x.radius != y.radius || x.center != y.center || x.coeff != y.coeff) return false;
  }
  return true;
}

bool SmoothMap::is_zero() const {
  SmoothMap n = normalized();
  if (!n.bumps_.empty()) return false;
  for (const auto& p : n.poly_)
    if (!p.is_zero()) return false;
  return true;
}

SmoothMap SmoothMap::fix_first_variable(const Rational& t) const {
  if (dom_ < 1) throw AtlasError(AtlasError::Kind::Dimension, "no variable to fix");
  std::vector<Polynomial> c;
  for (const auto& p : poly_) c.push_back(p.fix_variable(0, t));
  std::vector<BumpTerm> bumps;
  for (const auto& b : bumps_) {
    // restricting a radial bump to a hyperplane gives a radial bump of smaller radius
    Rational dt = t - b.center[0];
    Rational r2 = b.radius * b.radius - dt * dt;
    if (r2 <= 0) continue;
    if (dt != 0) throw AtlasError(AtlasError::Kind::Other, "off-center bump slice not representable");
    BumpTerm nb;
    nb.center.assign(b.center.begin() + 1, b.center.end());
    nb.radius = b.radius;
    for (const auto& p : b.coeff) nb.coeff.push_back(p.fix_variable(0, t));
    bumps.push_back(std::move(nb));
  }
  return SmoothMap(dom_ - 1, std::move(c), std::move(bumps));
}

SmoothMap SmoothMap::with_leading_variable() const {
  std::vector<int> map;
  for (int k = 0; k < dom_; ++k) map.push_back(k + 1);
  std::vector<Polynomial> c;
  for (const auto& p : poly_) c.push_back(p.remap(dom_ + 1, map));
  if (!bumps_.empty()) throw AtlasError(AtlasError::Kind::Other, "product of a bump-bearing map is not radial");
  return SmoothMap(dom_ + 1, std::move(c));
}

double SmoothMap::lipschitz_bound(const std::vector<double>& abs_radius) const {
  // Frobenius bound of the jacobian from coefficient bounds.
  double s = 0.0;
  for (int i = 0; i < cod_; ++i)
    for (int k = 0; k < dom_; ++k) {
      double v = dpoly_[i][k].abs_bound(abs_radius);
      s += v * v;
    }
  double lip = std::sqrt(s);
  for (const auto& b : bumps_) {
    // |d(w c)| <= |dw| |c| + |dc|, with max |dw| = 2/r * max_q sqrt(q)|phi'(q)| <= 2.2/r
    double cb = 0.0, dcb = 0.0;
    for (const auto& p : b.coeff) {
      double v = p.abs_bound(abs_radius);
      cb += v * v;
      for (int k = 0; k < dom_; ++k) {
        double d = p.derivative(k).abs_bound(abs_radius);
        dcb += d * d;
      }
    }
    lip += 2.2 / b.radius_d() * std::sqrt(cb) + std::sqrt(dcb);
  }
  return lip;
}

std::vector<std::string> SmoothMap::to_strings() const {
  std::vector<std::string> out;
  for (const auto& p : poly_) out.push_back(p.to_string());
  return out;
}

}  // namespace kuranishi
