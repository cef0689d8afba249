#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "burst/error.hpp"

namespace burst {

// Dense row-major matrix of doubles. Rows are the elements of a set,
// columns the embedding coordinates.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }
  std::span<const double> row_span(std::size_t i) const { return {row(i), cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// A set of per-element embedding vectors with identity metadata and
// optional per-element quality scores in (0,1].
struct FeatureSet {
  std::string set_id;
  std::string identity;
  Matrix features;               // n x d
  std::vector<double> quality;   // empty, or length n
  std::vector<double> raw_norms; // pre-normalization row norms, filled by normalize()

  std::size_t size() const { return features.rows(); }
  std::size_t dim() const { return features.cols(); }
};

enum class WeightKind { attention, self_sim, gmp, qagmp, sampling };

const char* to_string(WeightKind kind);
WeightKind weight_kind_from_string(const std::string& name);

// Length-n per-element scores. The kind pins the range contract:
// attention in (0,1), sampling nonnegative summing to 1, self_sim in [-1,1].
struct WeightVector {
  WeightKind kind = WeightKind::sampling;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

// Throws Error(Contract) when the kind-specific invariants are violated.
void validate(const WeightVector& w);

struct HyperParams {
  double lambda = 1.0;   // GMP ridge
  double lambda1 = 0.5;  // group-weight exponent
  double lambda2 = 2.0;  // self-similarity exponent
  double lambda3 = 10.0; // GMP sampling scale
  double lambda4 = 5.0;  // quality regularizer
  std::size_t n_t = 15;  // training-instance size
  std::size_t k = 0;     // kNN count; 0 selects max(2, ceil(sqrt(n)))
  double beta = 0.3;     // Quickshift++ fluctuation
};

// The aggregated d-dimensional template of a set, unit-normalized.
struct SetRepresentation {
  std::string set_id;
  std::vector<double> vector;
  std::string method;

  std::size_t dim() const { return vector.size(); }
};

struct VerificationPair {
  std::string a;
  std::string b;
  bool same = false;
};

struct IdentificationEntry {
  std::string set_id;
  bool in_gallery = false;
  std::string identity;
};

// Labeled pairs for 1:1 verification and probe/gallery lists for 1:N
// identification. Either part may be empty depending on the protocol file.
struct EvalProtocol {
  std::vector<VerificationPair> pairs;
  std::vector<IdentificationEntry> entries;
};

}  // namespace burst
