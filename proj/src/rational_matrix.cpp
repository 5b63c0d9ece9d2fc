#include "kuranishi/rational_matrix.hpp"

namespace kuranishi {

RationalMatrix RationalMatrix::identity(int n) {
  RationalMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::from_double(const Mat& a) {
  RationalMatrix m(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
  for (int r = 0; r < m.rows_; ++r)
    for (int c = 0; c < m.cols_; ++c) m(r, c) = to_rational(a(r, c));
  return m;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& o) const {
  if (cols_ != o.rows_) throw AtlasError(AtlasError::Kind::Dimension, "matrix product shape mismatch");
  RationalMatrix out(rows_, o.cols_);
  for (int r = 0; r < rows_; ++r)
    for (int k = 0; k < cols_; ++k) {
      const Rational& a = (*this)(r, k);
      if (a == 0) continue;
      for (int c = 0; c < o.cols_; ++c) out(r, c) += a * o(k, c);
    }
  return out;
}

RationalMatrix RationalMatrix::operator+(const RationalMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw AtlasError(AtlasError::Kind::Dimension, "matrix sum shape mismatch");
  RationalMatrix out(*this);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += o.data_[i];
  return out;
}

RationalMatrix RationalMatrix::operator-(const RationalMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw AtlasError(AtlasError::Kind::Dimension, "matrix difference shape mismatch");
  RationalMatrix out(*this);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= o.data_[i];
  return out;
}

bool RationalMatrix::operator==(const RationalMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

RationalMatrix RationalMatrix::hconcat(const RationalMatrix& o) const {
  if (rows_ != o.rows_) throw AtlasError(AtlasError::Kind::Dimension, "hconcat row mismatch");
  RationalMatrix out(rows_, cols_ + o.cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) out(r, c) = (*this)(r, c);
    for (int c = 0; c < o.cols_; ++c) out(r, cols_ + c) = o(r, c);
  }
  return out;
}

RationalMatrix RationalMatrix::vconcat(const RationalMatrix& o) const {
  if (cols_ != o.cols_) throw AtlasError(AtlasError::Kind::Dimension, "vconcat column mismatch");
  RationalMatrix out(rows_ + o.rows_, cols_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) out(r, c) = (*this)(r, c);
  for (int r = 0; r < o.rows_; ++r)
    for (int c = 0; c < cols_; ++c) out(rows_ + r, c) = o(r, c);
  return out;
}

RationalMatrix RationalMatrix::columns(int start, int count) const {
  RationalMatrix out(rows_, count);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < count; ++c) out(r, c) = (*this)(r, start + c);
  return out;
}

RationalMatrix RationalMatrix::rref(std::vector<int>* pivots) const {
  RationalMatrix m(*this);
  std::vector<int> piv;
  int row = 0;
  for (int col = 0; col < cols_ && row < rows_; ++col) {
    int p = -1;
    for (int r = row; r < rows_; ++r)
      if (m(r, col) != 0) {
        p = r;
        break;
      }
    if (p < 0) continue;
    if (p != row)
      for (int c = 0; c < cols_; ++c) std::swap(m(p, c), m(row, c));
    Rational inv = 1 / m(row, col);
    for (int c = 0; c < cols_; ++c) m(row, c) *= inv;
    for (int r = 0; r < rows_; ++r) {
      if (r == row || m(r, col) == 0) continue;
      Rational f = m(r, col);
      for (int c = 0; c < cols_; ++c) m(r, c) -= f * m(row, c);
    }
    piv.push_back(col);
    ++row;
  }
  if (pivots) *pivots = piv;
  return m;
}

int RationalMatrix::rank() const {
  std::vector<int> piv;
  rref(&piv);
  return static_cast<int>(piv.size());
}

bool RationalMatrix::is_zero() const {
  for (const auto& q : data_)
    if (q != 0) return false;
  return true;
}

RationalMatrix RationalMatrix::nullspace() const {
  std::vector<int> piv;
  RationalMatrix r = rref(&piv);
  std::vector<bool> is_piv(cols_, false);
  for (int p : piv) is_piv[p] = true;
  std::vector<int> free;
  for (int c = 0; c < cols_; ++c)
    if (!is_piv[c]) free.push_back(c);
  RationalMatrix ns(cols_, static_cast<int>(free.size()));
  for (std::size_t f = 0; f < free.size(); ++f) {
    ns(free[f], static_cast<int>(f)) = 1;
    for (std::size_t i = 0; i < piv.size(); ++i) ns(piv[i], static_cast<int>(f)) = -r(static_cast<int>(i), free[f]);
  }
  return ns;
}

RationalMatrix RationalMatrix::annihilator() const { return transpose().nullspace().transpose(); }

RationalMatrix RationalMatrix::inverse() const {
  if (rows_ != cols_) throw AtlasError(AtlasError::Kind::Rank, "inverse of non-square matrix");
  RationalMatrix aug = hconcat(identity(rows_));
  std::vector<int> piv;
  RationalMatrix r = aug.rref(&piv);
  if (static_cast<int>(piv.size()) < rows_ || (rows_ > 0 && piv[rows_ - 1] >= rows_))
    throw AtlasError(AtlasError::Kind::Rank, "singular matrix");
  return r.columns(rows_, rows_);
}

RationalMatrix RationalMatrix::left_inverse() const {
  RationalMatrix t = transpose();
  return (t * *this).inverse() * t;
}

Mat RationalMatrix::to_double() const {
  Mat m(rows_, cols_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) m(r, c) = (*this)(r, c).get_d();
  return m;
}

std::vector<std::vector<std::string>> RationalMatrix::to_strings() const {
  std::vector<std::vector<std::string>> out(rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) out[r].push_back(rational_string((*this)(r, c)));
  return out;
}

int intersection_dim(const RationalMatrix& A, const RationalMatrix& B) {
  return A.rank() + B.rank() - A.hconcat(B).rank();
}

bool is_intersection(const RationalMatrix& A, const RationalMatrix& B, const RationalMatrix& C) {
  int rc = C.rank();
  if (A.hconcat(C).rank() != A.rank()) return false;
  if (B.hconcat(C).rank() != B.rank()) return false;
  return intersection_dim(A, B) == rc;
}

}  // namespace kuranishi
