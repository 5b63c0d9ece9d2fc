#pragma once

#include "kuranishi/types.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace kuranishi {

// Multivariate polynomial with exact rational coefficients.  A compiled
// double-precision copy is kept alongside for fast evaluation.
class Polynomial {
 public:
  using Exponents = std::vector<int>;
  using TermMap = std::map<Exponents, Rational>;

  Polynomial() : Polynomial(0) {}
  explicit Polynomial(int nvars);
  Polynomial(int nvars, TermMap terms);

  static Polynomial constant(int nvars, const Rational& c);
  static Polynomial variable(int nvars, int k);  // k is 0-based
  static Polynomial parse(const std::string& text, int nvars);

  int nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  int degree() const;
  bool is_affine() const { return degree() <= 1; }
  Rational coefficient(const Exponents& e) const;
  Rational constant_term() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial scaled(const Rational& c) const;
  Polynomial pow(int n) const;
  bool operator==(const Polynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  Polynomial derivative(int k) const;
  // Substitute polynomial values (all in a common variable count) for the variables.
  Polynomial substitute(const std::vector<Polynomial>& values) const;
  // Reindex: variable k becomes variable map[k] in a ring with new_nvars variables.
  Polynomial remap(int new_nvars, const std::vector<int>& map) const;
  // Fix variable k to a rational value and drop it.
  Polynomial fix_variable(int k, const Rational& value) const;

  double eval(const double* x) const;
  double eval(const Vec& x) const { return eval(x.data()); }
  Rational eval_exact(const std::vector<Rational>& x) const;
  // Upper bound on |p| and on |dp/dx_k| over a box (coefficient bounds).
  double abs_bound(const std::vector<double>& radius_abs) const;

  std::string to_string() const;

 private:
  void compile();

  int nvars_;
  TermMap terms_;
  struct Compiled {
    std::vector<double> coeff;
    std::vector<int> exps;  // row-major, nvars per term
    int max_exp = 0;
  };
  std::shared_ptr<const Compiled> compiled_;
};

}  // namespace kuranishi
