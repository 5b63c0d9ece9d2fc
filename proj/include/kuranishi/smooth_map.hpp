#pragma once

#include "kuranishi/polynomial.hpp"
#include "kuranishi/rational_matrix.hpp"

#include <vector>

namespace kuranishi {

// exp(1 - 1/(1 - |x-c|^2/r^2)) inside the ball, 0 outside.
double bump_profile(double q);             // q = |x-c|^2 / r^2
double bump_profile_derivative(double q);  // d/dq

struct BumpTerm {
  std::vector<Rational> center;
  Rational radius;
  std::vector<Polynomial> coeff;  // one per output component

  Vec center_d() const;
  double radius_d() const { return radius.get_d(); }
};

// Polynomial map plus bump-times-polynomial terms.
class SmoothMap {
 public:
  SmoothMap() = default;
  SmoothMap(int dom, int cod);
  SmoothMap(int dom, std::vector<Polynomial> components, std::vector<BumpTerm> bumps = {});

  static SmoothMap zero(int dom, int cod) { return SmoothMap(dom, cod); }
  static SmoothMap identity(int n);
  static SmoothMap parse(const std::vector<std::string>& components, int dom);
  // x -> A x + b
  static SmoothMap affine(const RationalMatrix& A, const std::vector<Rational>& b);

  int domain_dim() const { return dom_; }
  int codomain_dim() const { return cod_; }
  const std::vector<Polynomial>& components() const { return poly_; }
  const std::vector<BumpTerm>& bumps() const { return bumps_; }
  bool is_polynomial() const { return bumps_.empty(); }
  bool is_affine() const;

  Vec eval(const Vec& x) const;
  Mat jacobian(const Vec& x) const;
  std::vector<Rational> eval_exact(const std::vector<Rational>& x) const;  // polynomial part only
  // Linear part and translation of an affine map.
  RationalMatrix linear_part() const;
  std::vector<Rational> translation() const;

  // this ∘ inner.  Exact when representable; throws AtlasError(Other) otherwise.
  SmoothMap compose(const SmoothMap& inner) const;
  // A ∘ this
  SmoothMap left_multiply(const RationalMatrix& A) const;
  SmoothMap operator+(const SmoothMap& o) const;
  SmoothMap operator-(const SmoothMap& o) const;
  // Canonical form: bumps with equal center/radius merged, zero bumps dropped, sorted.
  SmoothMap normalized() const;
  bool equals(const SmoothMap& o) const;
  bool is_zero() const;

  // Drop (fix) a leading variable / add a leading dummy variable.
  SmoothMap fix_first_variable(const Rational& t) const;
  SmoothMap with_leading_variable() const;
  // Upper bound of the Euclidean operator norm of the jacobian over a box,
  // given per-coordinate bounds on |x| (polynomial part; bump part estimated).
  double lipschitz_bound(const std::vector<double>& abs_radius) const;

  std::vector<std::string> to_strings() const;

 private:
  void build_derivatives();

  int dom_ = 0, cod_ = 0;
  std::vector<Polynomial> poly_;
  std::vector<BumpTerm> bumps_;
  std::vector<std::vector<Polynomial>> dpoly_;  // cod x dom
};

}  // namespace kuranishi
