#pragma once

#include <span>
#include <vector>

#include "burst/quickshift.hpp"
#include "burst/types.hpp"

namespace burst {

// Query vector scoring each element; stands in for a trained attention
// block.
struct AttentionQuery {
  std::vector<double> q;
};

enum class QualitySource { manifest, attention, norm_proxy, uniform };

const char* to_string(QualitySource source);
QualitySource quality_source_from_string(const std::string& name);

// alpha_i = sigmoid(q . f_i), entries in (0,1). Rows must be normalized.
WeightVector attention_scores(const FeatureSet& set, const AttentionQuery& query);

// Configurable (0,1) quality scores: manifest sidecar passthrough,
// sigmoid attention against a query, pre-normalization row norms min-max
// squashed into [0.01, 0.99], or constant 0.5.
WeightVector quality_scores(const FeatureSet& set, QualitySource source,
                            const AttentionQuery* query = nullptr);

// F = sum_i (prod_w w_i) f_i, unit-normalized. A single weight vector is
// the plain attention pipeline; several combine multiplicatively. Negative
// coefficients (raw GMP weights) pass through; normalization is sign-safe.
SetRepresentation weighted_aggregate(const FeatureSet& set,
                                     std::span<const WeightVector> weights);

// Group-democratic aggregation: mean the rows of each group, unit-normalize
// the group vectors, sum them, unit-normalize the sum.
SetRepresentation two_stage_aggregate(const FeatureSet& set, const GroupPartition& partition);

// Cosine similarity of two unit representations.
double pairwise_similarity(const SetRepresentation& a, const SetRepresentation& b);

}  // namespace burst
