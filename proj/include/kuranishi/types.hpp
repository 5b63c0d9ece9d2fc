#pragma once

#include <Eigen/Dense>
#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kuranishi {

using Rational = mpq_class;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Sorted list of basic chart labels.
using IndexSet = std::vector<int>;

std::string to_string(const IndexSet& I);
IndexSet parse_index_set(const std::string& s);
bool is_subset(const IndexSet& a, const IndexSet& b);
bool is_proper_subset(const IndexSet& a, const IndexSet& b);
IndexSet set_union(const IndexSet& a, const IndexSet& b);
IndexSet set_intersection(const IndexSet& a, const IndexSet& b);
bool comparable(const IndexSet& a, const IndexSet& b);

Rational parse_rational(const std::string& s);
Rational to_rational(double x);
std::string rational_string(const Rational& q);
double to_double(const Rational& q);

struct Tolerances {
  double rank = 1e-8;      // relative to the largest singular value
  double eq = 1e-9;
  double id = 1e-7;
  double transv = 1e-6;
  double fit = 1e-9;
};

class AtlasError : public std::runtime_error {
 public:
  enum class Kind { Schema, Rank, Dimension, Containment, Chain, Cover, Precompact, Other };
  AtlasError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

const char* kind_name(AtlasError::Kind kind);

// splitmix64; used for all seeded randomness so results do not depend on the
// standard library's distribution implementations.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix64(seed)) {}
  std::uint64_t next() {
    state_ = mix64(state_);
    return state_;
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::uint64_t state_;
};

std::uint64_t hash_index_set(const IndexSet& I, std::uint64_t seed);

}  // namespace kuranishi
