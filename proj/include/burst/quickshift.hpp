#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "burst/types.hpp"

namespace burst {

// Disjoint partition of a set's elements into n_q groups.
struct GroupPartition {
  std::vector<std::uint32_t> assignments;   // length n, values in [0, n_q)
  std::vector<std::size_t> cardinalities;   // length n_q, each >= 1

  std::size_t n_q() const { return cardinalities.size(); }
};

// Throws Error(Contract) unless assignments cover [0, n_q) consistently
// with the cardinalities.
void validate(const GroupPartition& p, std::size_t n);

// Exact kNN over Euclidean distance on normalized rows. The full distance
// matrix is retained; sets are small enough that O(n^2) storage is the
// simple deterministic choice.
struct KnnGraph {
  std::vector<std::vector<std::uint32_t>> neighbors;  // k indices each, self excluded
  std::vector<double> radii;                          // distance to the k-th neighbor
  Matrix dist;                                        // full symmetric distance matrix

  std::size_t size() const { return radii.size(); }
};

// Brute-force kNN, 1 <= k < n. Ties broken by lower index.
KnnGraph build_knn(const FeatureSet& set, std::size_t k);

// log f(x_i) up to a shared constant: -d * log(max(radius_i, 1e-12)).
// Comparisons stay in log domain so r^-d cannot overflow at embedding
// dimensions.
std::vector<double> knn_log_density(const KnnGraph& graph, std::size_t d);

// Extracts disjoint density cluster cores: for each undominated density
// mode, the connected component of the mutual-kNN graph restricted to
// elements with log-density >= mode log-density + log(1-beta) that contains
// the mode. A mode is dominated when that component reaches an element of
// strictly higher density. beta in [0, 1).
std::vector<std::vector<std::uint32_t>> cluster_cores(const KnnGraph& graph,
                                                      std::span<const double> log_density,
                                                      double beta);

// Hill-climbing completion: every non-core element points to its nearest
// strictly denser element (ties by lower index; nearest core member when no
// denser element exists) and pointer chains are followed into a core.
// Returns one group per core, ordered by the core's mode index.
GroupPartition quickshift_assign(const KnnGraph& graph,
                                 std::span<const double> log_density,
                                 const std::vector<std::vector<std::uint32_t>>& cores);

// Composition of the four steps above. k = 0 selects default_knn_k(n).
// Deterministic for fixed input.
GroupPartition quickshiftpp(const FeatureSet& set, std::size_t k, double beta);

// max(2, ceil(sqrt(n))), clamped to n-1.
std::size_t default_knn_k(std::size_t n);

}  // namespace burst
