#include "burst/kernels.hpp"

#include <cmath>
#include <cstddef>

namespace burst::kernels {

namespace {

// Single gram entry; shared by the parallel and serial paths so both
// produce identical bits.
inline double dot_rows(const Matrix& x, std::size_t i, std::size_t j) {
  const double* a = x.row(i);
  const double* b = x.row(j);
  double acc = 0.0;
  for (std::size_t c = 0; c < x.cols(); ++c) acc += a[c] * b[c];
  return acc;
}

inline double sqdist_rows(const Matrix& x, std::size_t i, std::size_t j) {
  const double* a = x.row(i);
  const double* b = x.row(j);
  double acc = 0.0;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double diff = a[c] - b[c];
    acc += diff * diff;
  }
  return acc;
}

inline double norm_row(const Matrix& x, std::size_t i) {
  const double* a = x.row(i);
  double acc = 0.0;
  for (std::size_t c = 0; c < x.cols(); ++c) acc += a[c] * a[c];
  return std::sqrt(acc);
}

}  // namespace

Matrix gram(const Matrix& x) {
  const std::size_t n = x.rows();
  Matrix k(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    for (std::size_t j = static_cast<std::size_t>(i); j < n; ++j) {
      double v = dot_rows(x, static_cast<std::size_t>(i), j);
      k(static_cast<std::size_t>(i), j) = v;
      k(j, static_cast<std::size_t>(i)) = v;
    }
  }
  return k;
}

Matrix pairwise_sqdist(const Matrix& x) {
  const std::size_t n = x.rows();
  Matrix d(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < n; ++j) {
      double v = sqdist_rows(x, static_cast<std::size_t>(i), j);
      d(static_cast<std::size_t>(i), j) = v;
      d(j, static_cast<std::size_t>(i)) = v;
    }
  }
  return d;
}

std::vector<double> row_norms(const Matrix& x) {
  const std::size_t n = x.rows();
  std::vector<double> norms(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    norms[static_cast<std::size_t>(i)] = norm_row(x, static_cast<std::size_t>(i));
  }
  return norms;
}

namespace ref {

Matrix gram(const Matrix& x) {
  const std::size_t n = x.rows();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double v = dot_rows(x, i, j);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Matrix pairwise_sqdist(const Matrix& x) {
  const std::size_t n = x.rows();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = sqdist_rows(x, i, j);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

std::vector<double> row_norms(const Matrix& x) {
  const std::size_t n = x.rows();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = norm_row(x, i);
  return norms;
}

}  // namespace ref

}  // namespace burst::kernels
