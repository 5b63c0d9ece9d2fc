#include "kuranishi/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace kuranishi {

std::string to_string(const IndexSet& I) {
  std::string out = "{";
  for (std::size_t k = 0; k < I.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(I[k]);
  }
  return out + "}";
}

IndexSet parse_index_set(const std::string& s) {
  IndexSet I;
  std::string digits;
  auto flush = [&] {
    if (!digits.empty()) I.push_back(std::stoi(digits));
    digits.clear();
  };
  for (char c : s) {
    if (std::isdigit(static_cast<unsigned char>(c))) digits += c;
    else flush();
  }
  flush();
  std::sort(I.begin(), I.end());
  I.erase(std::unique(I.begin(), I.end()), I.end());
  return I;
}

bool is_subset(const IndexSet& a, const IndexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool is_proper_subset(const IndexSet& a, const IndexSet& b) {
  return a.size() < b.size() && is_subset(a, b);
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool comparable(const IndexSet& a, const IndexSet& b) { return is_subset(a, b) || is_subset(b, a); }

Rational parse_rational(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw AtlasError(AtlasError::Kind::Schema, "empty number");
  bool neg = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') {
    neg = s[pos] == '-';
    ++pos;
  }
  std::string body = s.substr(pos);
  Rational q;
  auto slash = body.find('/');
  auto bad = [&] { return AtlasError(AtlasError::Kind::Schema, "malformed number '" + raw + "'"); };
  if (slash != std::string::npos) {
    std::string num = body.substr(0, slash), den = body.substr(slash + 1);
    if (num.empty() || den.empty()) throw bad();
    for (char c : num + den)
      if (!std::isdigit(static_cast<unsigned char>(c))) throw bad();
    q = Rational(mpz_class(num), mpz_class(den));
    if (q.get_den() == 0) throw bad();
    q.canonicalize();
  } else {
    // decimal with optional exponent
    std::string mant = body;
    long exp10 = 0;
    auto e = body.find_first_of("eE");
    if (e != std::string::npos) {
      mant = body.substr(0, e);
      std::string ex = body.substr(e + 1);
      if (ex.empty()) throw bad();
      std::size_t used = 0;
      try {
        exp10 = std::stol(ex, &used);
      } catch (...) {
        throw bad();
      }
      if (used != ex.size()) throw bad();
    }
    std::string digits;
    long frac = 0;
    bool seen_dot = false;
    for (char c : mant) {
      if (c == '.') {
        if (seen_dot) throw bad();
        seen_dot = true;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        digits += c;
        if (seen_dot) ++frac;
      } else {
        throw bad();
      }
    }
    if (digits.empty()) throw bad();
    mpz_class n(digits);
    long shift = exp10 - frac;
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
    q = shift >= 0 ? Rational(n * p) : Rational(n, p);
    q.canonicalize();
  }
  return neg ? Rational(-q) : q;
}

Rational to_rational(double x) {
  if (!std::isfinite(x)) throw AtlasError(AtlasError::Kind::Other, "non-finite value");
  return Rational(x);
}

std::string rational_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_str();
}

double to_double(const Rational& q) { return q.get_d(); }

const char* kind_name(AtlasError::Kind kind) {
  switch (kind) {
    case AtlasError::Kind::Schema: return "schema";
    case AtlasError::Kind::Rank: return "rank";
    case AtlasError::Kind::Dimension: return "dimension";
    case AtlasError::Kind::Containment: return "containment";
    case AtlasError::Kind::Chain: return "chain";
    case AtlasError::Kind::Cover: return "cover";
    case AtlasError::Kind::Precompact: return "precompact";
    case AtlasError::Kind::Other: return "other";
  }
  return "other";
}

std::uint64_t hash_index_set(const IndexSet& I, std::uint64_t seed) {
  std::uint64_t h = mix64(seed ^ 0x5151);
  for (int i : I) h = mix64(h ^ static_cast<std::uint64_t>(i));
  return h;
}

}  // namespace kuranishi
