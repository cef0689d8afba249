#include "burst/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "burst/kernels.hpp"

namespace burst {

namespace {

void require_unit_rows(const FeatureSet& set) {
  std::vector<double> norms = kernels::row_norms(set.features);
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (std::abs(norms[i] - 1.0) > 1e-6) {
      throw Error(ErrorCode::Contract,
                  "row " + std::to_string(i) + " has norm " + std::to_string(norms[i]) +
                      "; normalize the set first");
    }
  }
}

double unit_normalize_in_place(std::vector<double>& v) {
  double sumsq = 0.0;
  for (double x : v) sumsq += x * x;
  double norm = std::sqrt(sumsq);
  if (norm >= 1e-300) {
    for (double& x : v) x /= norm;
  }
  return norm;
}

constexpr double kQualityMargin = 1e-9;  // keeps passthrough scores inside (0,1)

}  // namespace

const char* to_string(QualitySource source) {
  switch (source) {
    case QualitySource::manifest: return "manifest";
    case QualitySource::attention: return "attention";
    case QualitySource::norm_proxy: return "norm_proxy";
    case QualitySource::uniform: return "uniform";
  }
  return "unknown";
}

QualitySource quality_source_from_string(const std::string& name) {
  if (name == "manifest") return QualitySource::manifest;
  if (name == "attention") return QualitySource::attention;
  if (name == "norm_proxy" || name == "norm-proxy") return QualitySource::norm_proxy;
  if (name == "uniform") return QualitySource::uniform;
  throw Error(ErrorCode::Config, "unknown quality source '" + name + "'");
}

WeightVector attention_scores(const FeatureSet& set, const AttentionQuery& query) {
  if (query.q.size() != set.dim()) {
    throw Error(ErrorCode::Contract, "query dimension " + std::to_string(query.q.size()) +
                                         " does not match features dimension " +
                                         std::to_string(set.dim()));
  }
  require_unit_rows(set);
  WeightVector att;
  att.kind = WeightKind::attention;
  att.values.resize(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double* row = set.features.row(i);
    double dot = 0.0;
    for (std::size_t j = 0; j < set.dim(); ++j) dot += query.q[j] * row[j];
    att.values[i] = 1.0 / (1.0 + std::exp(-dot));
  }
  return att;
}

WeightVector quality_scores(const FeatureSet& set, QualitySource source,
                            const AttentionQuery* query) {
  WeightVector scores;
  scores.kind = WeightKind::attention;
  switch (source) {
    case QualitySource::manifest: {
      if (set.quality.size() != set.size()) {
        throw Error(ErrorCode::Config,
                    "manifest quality requested but absent for set '" + set.set_id + "'");
      }
      scores.values = set.quality;
      for (double& v : scores.values) {
        v = std::clamp(v, kQualityMargin, 1.0 - kQualityMargin);
      }
      break;
    }
    case QualitySource::attention: {
      if (query == nullptr) {
        throw Error(ErrorCode::Config, "attention quality requested without a query vector");
      }
      return attention_scores(set, *query);
    }
    case QualitySource::norm_proxy: {
      if (set.raw_norms.size() != set.size()) {
        throw Error(ErrorCode::Config,
                    "norm_proxy quality requires a normalized set with recorded raw norms");
      }
      auto [lo_it, hi_it] = std::minmax_element(set.raw_norms.begin(), set.raw_norms.end());
      double lo = *lo_it, hi = *hi_it;
      scores.values.resize(set.size());
      for (std::size_t i = 0; i < set.size(); ++i) {
        scores.values[i] = hi > lo
                               ? 0.01 + 0.98 * (set.raw_norms[i] - lo) / (hi - lo)
                               : 0.5;
      }
      break;
    }
    case QualitySource::uniform:
      scores.values.assign(set.size(), 0.5);
      break;
  }
  return scores;
}

SetRepresentation weighted_aggregate(const FeatureSet& set,
                                     std::span<const WeightVector> weights) {
  if (weights.empty()) {
    throw Error(ErrorCode::Param, "weighted_aggregate needs at least one weight vector");
  }
  require_unit_rows(set);
  std::string method;
  for (const WeightVector& w : weights) {
    if (w.size() != set.size()) {
      throw Error(ErrorCode::Contract, "weight length " + std::to_string(w.size()) +
                                           " does not match set size " +
                                           std::to_string(set.size()));
    }
    if (!method.empty()) method += '*';
    method += to_string(w.kind);
  }
  std::vector<double> f(set.dim(), 0.0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    double coeff = 1.0;
    for (const WeightVector& w : weights) coeff *= w.values[i];
    const double* row = set.features.row(i);
    for (std::size_t j = 0; j < set.dim(); ++j) f[j] += coeff * row[j];
  }
  if (unit_normalize_in_place(f) < 1e-300) {
    throw Error(ErrorCode::Degenerate,
                "weighted aggregate of set '" + set.set_id + "' is a zero vector");
  }
  SetRepresentation rep;
  rep.set_id = set.set_id;
  rep.vector = std::move(f);
  rep.method = method;
  return rep;
}

SetRepresentation two_stage_aggregate(const FeatureSet& set, const GroupPartition& partition) {
  require_unit_rows(set);
  validate(partition, set.size());
  std::vector<double> f(set.dim(), 0.0);
  for (std::size_t g = 0; g < partition.n_q(); ++g) {
    std::vector<double> group_mean(set.dim(), 0.0);
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (partition.assignments[i] != g) continue;
      const double* row = set.features.row(i);
      for (std::size_t j = 0; j < set.dim(); ++j) group_mean[j] += row[j];
    }
    for (double& v : group_mean) v /= static_cast<double>(partition.cardinalities[g]);
    if (unit_normalize_in_place(group_mean) < 1e-300) {
      throw Error(ErrorCode::Degenerate,
                  "group " + std::to_string(g) + " of set '" + set.set_id +
                      "' averaged to a zero vector");
    }
    for (std::size_t j = 0; j < set.dim(); ++j) f[j] += group_mean[j];
  }
  if (unit_normalize_in_place(f) < 1e-300) {
    throw Error(ErrorCode::Degenerate,
                "two-stage aggregate of set '" + set.set_id + "' is a zero vector");
  }
  SetRepresentation rep;
  rep.set_id = set.set_id;
  rep.vector = std::move(f);
  rep.method = "two-stage";
  return rep;
}

double pairwise_similarity(const SetRepresentation& a, const SetRepresentation& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::Contract, "representation dimensions differ: " +
                                         std::to_string(a.dim()) + " vs " +
                                         std::to_string(b.dim()));
  }
  double dot = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j) dot += a.vector[j] * b.vector[j];
  return dot;
}

}  // namespace burst
