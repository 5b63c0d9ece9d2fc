#include "kuranishi/differential.hpp"

#include <limits>

namespace kuranishi {

int numerical_rank(const Mat& A, double rel_tol) {
  if (A.rows() == 0 || A.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * s[0]) ++r;
  return r;
}

Mat column_basis(const Mat& A, double rel_tol) {
  if (A.rows() == 0) return Mat(0, 0);
  if (A.cols() == 0) return Mat(A.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullU);
  int r = numerical_rank(A, rel_tol);
  return svd.matrixU().leftCols(r);
}

Mat orthogonal_complement(const Mat& A, double rel_tol) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() == 0) return Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullU);
  int r = numerical_rank(A, rel_tol);
  return svd.matrixU().rightCols(n - r);
}

double min_singular_value(const Mat& A) {
  if (A.rows() == 0 && A.cols() == 0) return std::numeric_limits<double>::infinity();
  if (A.rows() == 0 || A.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(A);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

DifferentialData differential_data(const SmoothMap& f, const Vec& x, double rel_tol) {
  DifferentialData d;
  d.jacobian = f.jacobian(x);
  const Mat& J = d.jacobian;
  const int m = static_cast<int>(J.rows()), n = static_cast<int>(J.cols());
  d.rank = numerical_rank(J, rel_tol);
  if (n > 0 && m > 0) {
    Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    d.kernel = svd.matrixV().rightCols(n - d.rank);
    d.cokernel = svd.matrixU().rightCols(m - d.rank);
    d.sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
  } else {
    d.kernel = Mat::Identity(n, n);
    d.cokernel = Mat::Identity(m, m);
    d.sigma_min = m == 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return d;
}

DifferentialData differential_data(const SmoothMap& f, const std::vector<Rational>& x, double rel_tol) {
  Vec v(static_cast<int>(x.size()));
  for (std::size_t k = 0; k < x.size(); ++k) v[static_cast<int>(k)] = x[k].get_d();
  return differential_data(f, v, rel_tol);
}

}  // namespace kuranishi
