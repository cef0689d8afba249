#pragma once

#include <span>
#include <vector>

#include "burst/types.hpp"

namespace burst {

// Symmetric n x n matrix of pairwise cosine similarities of a
// unit-normalized set (K = X X^T).
struct GramMatrix {
  Matrix values;

  std::size_t size() const { return values.rows(); }
};

// Throws Error(Contract) unless values is square, symmetric within 1e-12,
// and has unit diagonal within 1e-9.
void validate(const GramMatrix& k);

// K = X X^T. Rows must be unit-normalized within 1e-6.
GramMatrix gram(const FeatureSet& set);

// Per-element mean similarity to the whole set: S = K 1_n / n. High values
// flag bursty elements.
WeightVector self_similarity(const GramMatrix& k);

// GMP weights: the solution of (K + lambda I) alpha = 1_n, computed with a
// Cholesky factorization (never an explicit inverse). Weights may be
// negative and are passed through unclamped; the dual form F = X^T alpha
// requires them as-is.
WeightVector gmp_weights(const GramMatrix& k, double lambda);

// F = sum_i alpha_i f_i, unit-normalized. Method tag follows alpha.kind.
SetRepresentation gmp_representation(const FeatureSet& set, const WeightVector& alpha);

// Quality-aware GMP weights: solves (K + lambda I) alpha = 1_n + lambda4 * att.
// With lambda4 = 0 the output is bit-identical to gmp_weights.
WeightVector qagmp_weights(const GramMatrix& k, double lambda, double lambda4,
                           const WeightVector& attention);

// Mean of the self-similarity matrix; ranks sets by internal redundancy.
double burst_degree(const GramMatrix& k);

// Elementwise sign(x)*|x|^p followed by unit Euclidean normalization,
// p in (0,1].
std::vector<double> power_normalize(std::span<const double> v, double p);

namespace detail {

// Solves A x = b for symmetric positive-definite A via an in-place LL^T
// factorization plus one step of iterative refinement. Throws
// Error(Numeric) naming the pivot when the factorization breaks down, or
// when the final residual max-norm exceeds 1e-8.
std::vector<double> solve_spd(const Matrix& a, std::span<const double> b);

}  // namespace detail

}  // namespace burst
