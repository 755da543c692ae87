#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "g2mu/rational.hpp"

namespace g2mu {

/// Small dense row-major matrix over an exact or floating scalar. Sizes in
/// this project never exceed a few dozen, so no blocking or expression
/// templates are used.
template <class S>
class Matrix {
 public:
  using Scalar = S;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, S(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  static Matrix from_rows(const std::vector<std::vector<S>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < m.rows_; ++i) {
      if (rows[i].size() != m.cols_) throw std::invalid_argument("ragged matrix rows");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static Matrix from_columns(std::size_t rows, const std::vector<std::vector<S>>& cols) {
    Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != rows) throw std::invalid_argument("column length mismatch");
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  S& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const S& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<S> column(std::size_t c) const {
    std::vector<S> v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  template <class T>
  Matrix<T> cast() const {
    Matrix<T> out(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(r, c) = scalar_cast<T>((*this)(r, c));
    return out;
  }

  S trace() const {
    S t(0);
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double max_magnitude() const {
    double m = 0.0;
    for (const auto& x : data_) m = std::max(m, ScalarTraits<S>::magnitude(x));
    return m;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    a.check_same_shape(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }
  friend Matrix operator-(Matrix a, const Matrix& b) {
    a.check_same_shape(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }
  friend Matrix operator*(const S& s, Matrix a) {
    for (auto& x : a.data_) x *= s;
    return a;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const S& aik = a(i, k);
        if (aik == S(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    }
    return c;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  void check_same_shape(const Matrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) throw std::invalid_argument("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> data_;
};

/// Matrix-vector product with mixed scalars (real matrix acting on complex
/// coefficients, for instance).
template <class M, class V>
std::vector<V> apply(const Matrix<M>& m, const std::vector<V>& v) {
  if (m.cols() != v.size()) throw std::invalid_argument("matrix-vector shape mismatch");
  std::vector<V> out(m.rows(), V(0));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    V acc(0);
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j) == M(0)) continue;
      if constexpr (std::is_same_v<M, V>) {
        acc += m(i, j) * v[j];
      } else {
        acc += scalar_cast<V>(m(i, j)) * v[j];
      }
    }
    out[i] = acc;
  }
  return out;
}

template <class S>
Matrix<S> vstack(const Matrix<S>& top, const Matrix<S>& bottom) {
  if (top.cols() != bottom.cols()) throw std::invalid_argument("vstack width mismatch");
  Matrix<S> out(top.rows() + bottom.rows(), top.cols());
  for (std::size_t r = 0; r < top.rows(); ++r)
    for (std::size_t c = 0; c < top.cols(); ++c) out(r, c) = top(r, c);
  for (std::size_t r = 0; r < bottom.rows(); ++r)
    for (std::size_t c = 0; c < top.cols(); ++c) out(top.rows() + r, c) = bottom(r, c);
  return out;
}

template <class S>
Matrix<S> hstack(const Matrix<S>& left, const Matrix<S>& right) {
  return vstack(left.transpose(), right.transpose()).transpose();
}

template <class S>
struct RowEchelon {
  Matrix<S> reduced;
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

/// Reduced row echelon form. Exact scalars pivot on the first nonzero entry;
/// floating scalars use partial pivoting with a threshold relative to the
/// largest entry.
template <class S>
RowEchelon<S> rref(Matrix<S> m) {
  using Traits = ScalarTraits<S>;
  const double scale = m.max_magnitude();
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t best = m.rows();
    double best_mag = 0.0;
    for (std::size_t r = row; r < m.rows(); ++r) {
      if (Traits::is_zero(m(r, col), scale)) continue;
      if constexpr (Traits::exact) {
        best = r;
        break;
      } else {
        const double mag = Traits::magnitude(m(r, col));
        if (mag > best_mag) {
          best_mag = mag;
          best = r;
        }
      }
    }
    if (best == m.rows()) {
      if constexpr (!Traits::exact) {
        for (std::size_t r = row; r < m.rows(); ++r) m(r, col) = S(0);
      }
      continue;
    }
    if (best != row) {
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(row, c), m(best, c));
    }
    const S inv = S(1) / m(row, col);
    for (std::size_t c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col) == S(0)) continue;
      const S factor = m(r, col);
      for (std::size_t c = col; c < m.cols(); ++c) m(r, c) -= factor * m(row, c);
      if constexpr (!Traits::exact) m(r, col) = S(0);
    }
    pivots.push_back(col);
    ++row;
  }
  return {std::move(m), std::move(pivots)};
}

template <class S>
std::size_t rank(const Matrix<S>& m) {
  return rref(m).pivots.size();
}

/// Basis of the right null space, one vector per column. Each basis vector has
/// a 1 in its own free coordinate and 0 in the other free coordinates, so the
/// coordinates of any kernel vector are read off at the free positions.
template <class S>
Matrix<S> nullspace(const Matrix<S>& m, std::vector<std::size_t>* free_columns = nullptr) {
  const auto ech = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : ech.pivots) is_pivot[p] = true;
  std::vector<std::size_t> free;
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (!is_pivot[c]) free.push_back(c);
  Matrix<S> basis(m.cols(), free.size());
  for (std::size_t k = 0; k < free.size(); ++k) {
    basis(free[k], k) = S(1);
    for (std::size_t r = 0; r < ech.pivots.size(); ++r) basis(ech.pivots[r], k) = -ech.reduced(r, free[k]);
  }
  if (free_columns) *free_columns = std::move(free);
  return basis;
}

/// Basis of the column space (pivot columns of the input).
template <class S>
Matrix<S> column_space(const Matrix<S>& m) {
  const auto ech = rref(m);
  Matrix<S> basis(m.rows(), ech.pivots.size());
  for (std::size_t k = 0; k < ech.pivots.size(); ++k)
    for (std::size_t r = 0; r < m.rows(); ++r) basis(r, k) = m(r, ech.pivots[k]);
  return basis;
}

template <class S>
Matrix<S> inverse(const Matrix<S>& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse of non-square matrix");
  const std::size_t n = m.rows();
  const auto ech = rref(hstack(m, Matrix<S>::identity(n)));
  if (ech.pivots.size() < n || ech.pivots[n - 1] != n - 1) throw std::domain_error("singular matrix");
  Matrix<S> inv(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) inv(r, c) = ech.reduced(r, n + c);
  return inv;
}

template <class S>
S determinant(Matrix<S> m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  using Traits = ScalarTraits<S>;
  const std::size_t n = m.rows();
  const double scale = m.max_magnitude();
  S det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = n;
    double best = 0.0;
    for (std::size_t r = col; r < n; ++r) {
      if (Traits::is_zero(m(r, col), scale)) continue;
      if constexpr (Traits::exact) {
        piv = r;
        break;
      } else if (Traits::magnitude(m(r, col)) > best) {
        best = Traits::magnitude(m(r, col));
        piv = r;
      }
    }
    if (piv == n) return S(0);
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(col, c), m(piv, c));
      det = -det;
    }
    det *= m(col, col);
    const S inv = S(1) / m(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (m(r, col) == S(0)) continue;
      const S f = m(r, col) * inv;
      for (std::size_t c = col; c < n; ++c) m(r, c) -= f * m(col, c);
    }
  }
  return det;
}

}  // namespace g2mu
