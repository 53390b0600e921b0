// Copyright 2026 The sbqudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "sbq/error.hpp"

namespace sbq {

using cplx = std::complex<double>;

/// Small dense row-major complex matrix. Sizes in this library never exceed
/// 16, so no attempt is made at blocking or vectorization.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ValidationError("matrix", "ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static CMatrix diagonal(std::span<const cplx> d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const cplx> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  CMatrix adjoint() const {
    CMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  CMatrix& operator+=(const CMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  CMatrix& operator*=(cplx s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
  friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols_ != b.rows_) throw ValidationError("matrix", "shape mismatch in product");
    CMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  std::vector<cplx> apply(std::span<const cplx> v) const {
    if (v.size() != cols_) throw ValidationError("matrix", "vector length mismatch");
    std::vector<cplx> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      cplx acc{};
      for (std::size_t c = 0; c < cols_; ++c) acc += (*this)(r, c) * v[c];
      out[r] = acc;
    }
    return out;
  }

  /// Largest entrywise modulus.
  double max_abs() const {
    double m = 0.0;
    for (const auto& x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& x : data_) s += std::norm(x);
    return std::sqrt(s);
  }

  cplx trace() const {
    cplx t{};
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

 private:
  void require_same_shape(const CMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ValidationError("matrix", "shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

/// Kronecker product a ⊗ b.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// max |M - M†|.
inline double hermiticity_defect(const CMatrix& m) {
  if (!m.square()) return INFINITY;
  return (m - m.adjoint()).max_abs();
}

/// max |U U† - 1|.
inline double unitarity_defect(const CMatrix& u) {
  if (!u.square()) return INFINITY;
  return (u * u.adjoint() - CMatrix::identity(u.rows())).max_abs();
}

inline bool is_hermitian(const CMatrix& m, double tol = 1e-12) { return hermiticity_defect(m) <= tol; }
inline bool is_unitary(const CMatrix& u, double tol = 1e-12) { return unitarity_defect(u) <= tol; }

}  // namespace sbq
