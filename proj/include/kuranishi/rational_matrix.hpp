#pragma once

#include "kuranishi/types.hpp"

#include <string>
#include <vector>

namespace kuranishi {

// Dense matrix over the rationals; used wherever a rank or identity must be
// decided exactly (obstruction embeddings, additivity, filtration).
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}
  static RationalMatrix identity(int n);
  static RationalMatrix from_double(const Mat& m);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const Rational& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  RationalMatrix operator*(const RationalMatrix& o) const;
  RationalMatrix operator+(const RationalMatrix& o) const;
  RationalMatrix operator-(const RationalMatrix& o) const;
  bool operator==(const RationalMatrix& o) const;
  bool operator!=(const RationalMatrix& o) const { return !(*this == o); }
  RationalMatrix transpose() const;
  RationalMatrix hconcat(const RationalMatrix& o) const;
  RationalMatrix vconcat(const RationalMatrix& o) const;
  RationalMatrix columns(int start, int count) const;

  int rank() const;
  bool is_zero() const;
  // Reduced row echelon form; pivots returned in order.
  RationalMatrix rref(std::vector<int>* pivots = nullptr) const;
  // Basis of the right null space (columns).
  RationalMatrix nullspace() const;
  // Rows spanning the annihilator of the column space: Q with Q*A = 0, full row rank.
  RationalMatrix annihilator() const;
  RationalMatrix inverse() const;  // throws when singular
  // Left inverse (A^T A)^{-1} A^T of a full column rank matrix.
  RationalMatrix left_inverse() const;

  Mat to_double() const;
  std::vector<std::vector<std::string>> to_strings() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Rational> data_;
};

// dim(span A ∩ span B) for column spaces.
int intersection_dim(const RationalMatrix& A, const RationalMatrix& B);
// span(C) == span(A) ∩ span(B)
bool is_intersection(const RationalMatrix& A, const RationalMatrix& B, const RationalMatrix& C);

}  // namespace kuranishi
