#pragma once
// matrix.hpp -- dense complex matrices, row-major storage.
//
// Just enough linear algebra for the laboratory: construction, adjoints,
// norms, and a cache-aware multiply.  Entry (i, j) is row i, column j.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <thread>
#include <vector>

#include "toeplab/common.hpp"

namespace toeplab {

class ComplexMatrix {
 public:
  ComplexMatrix() : rows_(0), cols_(0) {}
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, complex(0.0, 0.0)) {
    if (rows == 0 || cols == 0)
      throw std::invalid_argument("ComplexMatrix: zero dimension");
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  complex& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const complex& operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  complex* row(std::size_t i) { return a_.data() + i * cols_; }
  const complex* row(std::size_t i) const { return a_.data() + i * cols_; }

  const std::vector<complex>& data() const { return a_; }
  std::vector<complex>& data() { return a_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        m(j, i) = std::conj((*this)(i, j));
    return m;
  }

  double max_abs() const {
    double m = 0.0;
    for (const complex& z : a_) m = std::max(m, std::abs(z));
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const complex& z : a_) s += std::norm(z);
    return std::sqrt(s);
  }

  // max_{i,j} |a_ij - conj(a_ji)| over square matrices.
  double hermitian_defect() const {
    if (rows_ != cols_)
      throw std::invalid_argument("hermitian_defect: matrix not square");
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return m;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<complex> a_;
};

inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix add: shape mismatch");
  ComplexMatrix c = a;
  for (std::size_t k = 0; k < c.data().size(); ++k) c.data()[k] += b.data()[k];
  return c;
}

inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix subtract: shape mismatch");
  ComplexMatrix c = a;
  for (std::size_t k = 0; k < c.data().size(); ++k) c.data()[k] -= b.data()[k];
  return c;
}

inline ComplexMatrix operator*(complex s, const ComplexMatrix& a) {
  ComplexMatrix c = a;
  for (complex& z : c.data()) z *= s;
  return c;
}

namespace detail {

// Row-block worker dispatch.  Each worker owns a disjoint row range, so the
// result is bit-identical for any thread count.
template <class Fn>
void for_each_row_block(std::size_t nrows, Fn&& fn) {
  unsigned nt = thread_count();
  if (nt <= 1 || nrows < 64) {
    fn(std::size_t{0}, nrows);
    return;
  }
  nt = std::min<std::size_t>(nt, nrows);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::size_t chunk = (nrows + nt - 1) / nt;
  for (unsigned t = 0; t < nt; ++t) {
    std::size_t lo = t * chunk, hi = std::min(nrows, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

// C = A * B.  i-k-j loop order keeps the inner accumulation on contiguous
// rows of B and C.
inline ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("multiply: inner dimension mismatch");
  ComplexMatrix c(a.rows(), b.cols());
  const std::size_t n = b.cols(), kk = a.cols();
  detail::for_each_row_block(a.rows(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      complex* ci = c.row(i);
      for (std::size_t k = 0; k < kk; ++k) {
        const complex aik = a(i, k);
        if (aik == complex(0.0, 0.0)) continue;
        const complex* bk = b.row(k);
        for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
      }
    }
  });
  return c;
}

// A^H * A without forming the adjoint: Gram matrix of the columns.
inline ComplexMatrix gram(const ComplexMatrix& a) {
  ComplexMatrix g(a.cols(), a.cols());
  const std::size_t n = a.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const complex* ar = a.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      const complex ci = std::conj(ar[i]);
      if (ci == complex(0.0, 0.0)) continue;
      complex* gi = g.row(i);
      for (std::size_t j = i; j < n; ++j) gi[j] += ci * ar[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = std::conj(g(j, i));
  return g;
}

}  // namespace toeplab
