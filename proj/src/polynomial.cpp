#include "kuranishi/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace kuranishi {

Polynomial::Polynomial(int nvars) : nvars_(nvars) { compile(); }

Polynomial::Polynomial(int nvars, TermMap terms) : nvars_(nvars) {
  for (auto& [e, c] : terms) {
    if (static_cast<int>(e.size()) != nvars)
      throw AtlasError(AtlasError::Kind::Other, "exponent length mismatch");
    if (c != 0) terms_.emplace(e, c);
  }
  compile();
}

Polynomial Polynomial::constant(int nvars, const Rational& c) {
  TermMap t;
  if (c != 0) t[Exponents(nvars, 0)] = c;
  return Polynomial(nvars, std::move(t));
}

Polynomial Polynomial::variable(int nvars, int k) {
  Exponents e(nvars, 0);
  e.at(k) = 1;
  TermMap t;
  t[e] = 1;
  return Polynomial(nvars, std::move(t));
}

void Polynomial::compile() {
  auto c = std::make_shared<Compiled>();
  c->coeff.reserve(terms_.size());
  c->exps.reserve(terms_.size() * nvars_);
  for (const auto& [e, q] : terms_) {
    c->coeff.push_back(q.get_d());
    for (int x : e) {
      c->exps.push_back(x);
      c->max_exp = std::max(c->max_exp, x);
    }
  }
  compiled_ = std::move(c);
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && degree() == 0);
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int x : e) s += x;
    d = std::max(d, s);
  }
  return terms_.empty() ? 0 : d;
}

Rational Polynomial::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational Polynomial::constant_term() const { return coefficient(Exponents(nvars_, 0)); }

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (o.nvars_ != nvars_) throw AtlasError(AtlasError::Kind::Other, "polynomial ring mismatch");
  TermMap t = terms_;
  for (const auto& [e, c] : o.terms_) {
    Rational& slot = t[e];
    slot += c;
    if (slot == 0) t.erase(e);
  }
  return Polynomial(nvars_, std::move(t));
}

Polynomial Polynomial::operator-() const { return scaled(-1); }

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::scaled(const Rational& c) const {
  TermMap t;
  if (c != 0)
    for (const auto& [e, q] : terms_) t[e] = q * c;
  return Polynomial(nvars_, std::move(t));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (o.nvars_ != nvars_) throw AtlasError(AtlasError::Kind::Other, "polynomial ring mismatch");
  TermMap t;
  Exponents e(nvars_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      for (int k = 0; k < nvars_; ++k) e[k] = ea[k] + eb[k];
      Rational& slot = t[e];
      slot += ca * cb;
    }
  for (auto it = t.begin(); it != t.end();) {
    if (it->second == 0) it = t.erase(it);
    else ++it;
  }
  return Polynomial(nvars_, std::move(t));
}

Polynomial Polynomial::pow(int n) const {
  if (n < 0) throw AtlasError(AtlasError::Kind::Other, "negative power");
  Polynomial result = constant(nvars_, 1), base = *this;
  while (n) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

Polynomial Polynomial::derivative(int k) const {
  TermMap t;
  for (const auto& [e, c] : terms_) {
    if (e[k] == 0) continue;
    Exponents f = e;
    f[k] -= 1;
    t[f] += c * e[k];
  }
  return Polynomial(nvars_, std::move(t));
}

Polynomial Polynomial::substitute(const std::vector<Polynomial>& values) const {
  if (static_cast<int>(values.size()) != nvars_)
    throw AtlasError(AtlasError::Kind::Other, "substitution arity mismatch");
  int m = values.empty() ? 0 : values[0].nvars();
  for (const auto& v : values)
    if (v.nvars() != m) throw AtlasError(AtlasError::Kind::Other, "substitution ring mismatch");
  if (nvars_ == 0) {
    // constants only
    return Polynomial::constant(m, constant_term());
  }
  // cache powers
  std::vector<std::vector<Polynomial>> powers(nvars_);
  Polynomial result(m);
  for (const auto& [e, c] : terms_) {
    Polynomial term = constant(m, c);
    for (int k = 0; k < nvars_; ++k) {
      if (e[k] == 0) continue;
      auto& pk = powers[k];
      if (pk.empty()) pk.push_back(constant(m, 1));
      while (static_cast<int>(pk.size()) <= e[k]) pk.push_back(pk.back() * values[k]);
      term = term * pk[e[k]];
    }
    result = result + term;
  }
  return result;
}

Polynomial Polynomial::remap(int new_nvars, const std::vector<int>& map) const {
  TermMap t;
  for (const auto& [e, c] : terms_) {
    Exponents f(new_nvars, 0);
    for (int k = 0; k < nvars_; ++k) {
      if (e[k] == 0) continue;
      f.at(map.at(k)) += e[k];
    }
    t[f] += c;
  }
  return Polynomial(new_nvars, std::move(t));
}

Polynomial Polynomial::fix_variable(int k, const Rational& value) const {
  TermMap t;
  for (const auto& [e, c] : terms_) {
    Exponents f;
    f.reserve(nvars_ - 1);
    for (int j = 0; j < nvars_; ++j)
      if (j != k) f.push_back(e[j]);
    Rational v = c;
    for (int p = 0; p < e[k]; ++p) v *= value;
    t[f] += v;
  }
  return Polynomial(nvars_ - 1, std::move(t));
}

double Polynomial::eval(const double* x) const {
  const Compiled& c = *compiled_;
  const std::size_t nt = c.coeff.size();
  if (nt == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t t = 0; t < nt; ++t) {
    double v = c.coeff[t];
    const int* e = c.exps.data() + t * nvars_;
    for (int k = 0; k < nvars_; ++k) {
      for (int p = 0; p < e[k]; ++p) v *= x[k];
    }
    sum += v;
  }
  return sum;
}

Rational Polynomial::eval_exact(const std::vector<Rational>& x) const {
  Rational sum = 0;
  for (const auto& [e, c] : terms_) {
    Rational v = c;
    for (int k = 0; k < nvars_; ++k)
      for (int p = 0; p < e[k]; ++p) v *= x[k];
    sum += v;
  }
  return sum;
}

double Polynomial::abs_bound(const std::vector<double>& r) const {
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    double v = std::fabs(c.get_d());
    for (int k = 0; k < nvars_; ++k) v *= std::pow(r[k], e[k]);
    s += v;
  }
  return s;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  // highest total degree first, then lexicographic
  std::vector<std::pair<Exponents, Rational>> ordered(terms_.begin(), terms_.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    int da = 0, db = 0;
    for (int x : a.first) da += x;
    for (int x : b.first) db += x;
    return da > db;
  });
  for (const auto& [e, c] : ordered) {
    Rational a = abs(c);
    bool neg = c < 0;
    if (first) out << (neg ? "-" : "");
    else out << (neg ? " - " : " + ");
    first = false;
    bool has_var = false;
    for (int x : e) has_var |= x > 0;
    bool unit = a == 1;
    if (!unit || !has_var) {
      out << rational_string(a);
      if (has_var) out << "*";
    }
    bool first_var = true;
    for (int k = 0; k < nvars_; ++k) {
      if (e[k] == 0) continue;
      if (!first_var) out << "*";
      first_var = false;
      out << "x" << (k + 1);
      if (e[k] > 1) out << "^" << e[k];
    }
  }
  return out.str();
}

namespace {

class Parser {
 public:
  Parser(const std::string& s, int nvars) : s_(s), nvars_(nvars) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& why) {
    throw AtlasError(AtlasError::Kind::Schema,
                     "polynomial '" + s_ + "': " + why + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  Polynomial expr() {
    Polynomial p = term();
    for (;;) {
      if (accept('+')) p = p + term();
      else if (accept('-')) p = p - term();
      else return p;
    }
  }
  Polynomial term() {
    Polynomial p = factor();
    while (accept('*')) p = p * factor();
    return p;
  }
  Polynomial factor() {
    if (accept('-')) return -factor();
    if (accept('+')) return factor();
    Polynomial b = base();
    if (accept('^')) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      b = b.pow(std::stoi(s_.substr(start, pos_ - start)));
    }
    return b;
  }
  Polynomial base() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (c == 'x') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected variable index");
      int k = std::stoi(s_.substr(start, pos_ - start));
      if (k < 1 || k > nvars_) fail("variable x" + std::to_string(k) + " out of range");
      return Polynomial::variable(nvars_, k - 1);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        std::size_t save = pos_;
        ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
        std::size_t ds = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (ds == pos_) pos_ = save;
      }
      if (pos_ < s_.size() && s_[pos_] == '/') {
        std::size_t save = pos_;
        ++pos_;
        std::size_t ds = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (ds == pos_) pos_ = save;
      }
      return Polynomial::constant(nvars_, parse_rational(s_.substr(start, pos_ - start)));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  int nvars_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial Polynomial::parse(const std::string& text, int nvars) { return Parser(text, nvars).parse(); }

}  // namespace kuranishi
