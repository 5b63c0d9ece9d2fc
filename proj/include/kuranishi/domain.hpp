#pragma once

#include "kuranishi/polynomial.hpp"
#include "kuranishi/smooth_map.hpp"

#include <vector>

namespace kuranishi {

// Open axis-aligned box with rational endpoints.
struct Box {
  std::vector<Rational> lo, hi;
  Vec lo_d, hi_d;

  Box() = default;
  Box(std::vector<Rational> lo, std::vector<Rational> hi);
  static Box from_double(const Vec& lo, const Vec& hi);
  static Box around(const Vec& center, double radius);

  int dim() const { return static_cast<int>(lo.size()); }
  bool empty() const;
  bool contains(const Vec& x) const;
  bool contains_exact(const std::vector<Rational>& x) const;
  // Signed distance to the boundary (positive inside) in the sup metric.
  double inner_depth(const Vec& x) const;
  // Euclidean distance to the closed box.
  double distance(const Vec& x) const;
  Vec center() const;
  Vec widths() const;
  Box shrunk(const Rational& m) const;
  Box expanded(double r) const;
  Box intersect(const Box& o) const;
  bool operator==(const Box& o) const { return lo == o.lo && hi == o.hi; }
};

struct DomainPiece {
  Box box;
  std::vector<Polynomial> constraints;  // p(x) > 0
};

// Finite union of boxes cut by strict polynomial inequalities.
class Domain {
 public:
  Domain() = default;
  explicit Domain(int dim) : dim_(dim) {}
  Domain(int dim, std::vector<DomainPiece> pieces);
  static Domain box(const Box& b);
  static Domain boxes(int dim, const std::vector<Box>& bs);
  static Domain point();  // the 0-dimensional domain consisting of one point

  int dim() const { return dim_; }
  const std::vector<DomainPiece>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }
  bool has_constraints() const;

  bool contains(const Vec& x) const;
  bool contains_exact(const std::vector<Rational>& x) const;
  int piece_containing(const Vec& x) const;  // -1 if none
  Box bounding_box() const;
  // Approximate Euclidean distance from x to the domain (box pieces; constraint slack estimated).
  double outside_distance(const Vec& x) const;
  // Depth of x inside the domain, box faces only (sup metric); negative outside.
  double inner_depth(const Vec& x) const;

  Domain intersect(const Domain& o) const;
  // {x in this : phi(x) in target}
  Domain pullback_within(const SmoothMap& phi, const Domain& target) const;
  // Boxes shrunk by m, constraints p > m.
  Domain shrunk(const Rational& m) const;
  Domain with_leading_interval(const Rational& a, const Rational& b) const;
  Domain slice_first(const Rational& t) const;
  // Merge redundant affine one-variable constraints into box bounds; drop empty pieces.
  Domain simplified() const;

  bool operator==(const Domain& o) const;

 private:
  int dim_ = 0;
  std::vector<DomainPiece> pieces_;
};

// Deterministic quasi-uniform grid plus jitter; every returned point is inside D.
std::vector<Vec> sample_domain(const Domain& D, int density, std::uint64_t seed);
// Same grid over a box without membership filtering.
std::vector<Vec> sample_box(const Box& b, int density, std::uint64_t seed, double jitter = 0.25);

}  // namespace kuranishi
