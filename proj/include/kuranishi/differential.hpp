#pragma once

#include "kuranishi/smooth_map.hpp"

namespace kuranishi {

struct DifferentialData {
  Mat jacobian;
  Mat kernel;    // columns
  Mat cokernel;  // columns spanning a complement of the image (orthogonal complement)
  double sigma_min = 0.0;
  int rank = 0;
};

// Numerical rank with threshold rel_tol * (largest singular value).
int numerical_rank(const Mat& A, double rel_tol);
DifferentialData differential_data(const SmoothMap& f, const Vec& x, double rel_tol = 1e-8);
DifferentialData differential_data(const SmoothMap& f, const std::vector<Rational>& x, double rel_tol = 1e-8);
// Orthonormal basis of the column space / its orthogonal complement.
Mat column_basis(const Mat& A, double rel_tol);
Mat orthogonal_complement(const Mat& A, double rel_tol);
// Smallest singular value; 0 for empty matrices with nonzero rows, +inf for 0x0.
double min_singular_value(const Mat& A);

}  // namespace kuranishi
