#pragma once

#include <vector>

#include "burst/types.hpp"

namespace burst::kernels {

// OpenMP-parallel entry points. Every output element is computed by the same
// scalar loop as in kernels::ref, only the rows are distributed across
// threads, so results are bitwise equal to the serial reference.

// x * x^T for row-major x (n x d) -> symmetric n x n.
Matrix gram(const Matrix& x);

// Squared Euclidean distances between all row pairs -> symmetric n x n,
// zero diagonal.
Matrix pairwise_sqdist(const Matrix& x);

// Euclidean norm of every row.
std::vector<double> row_norms(const Matrix& x);

namespace ref {

// Serial reference implementations, kept for equivalence tests and as the
// benchmark baseline.
Matrix gram(const Matrix& x);
Matrix pairwise_sqdist(const Matrix& x);
std::vector<double> row_norms(const Matrix& x);

}  // namespace ref

}  // namespace burst::kernels
