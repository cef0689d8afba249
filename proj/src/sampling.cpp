#include "burst/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "burst/rng.hpp"

namespace burst {

namespace {

void normalize_to_one(std::vector<double>& values, const char* what) {
  double sum = 0.0;
  for (double v : values) sum += v;
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw Error(ErrorCode::Degenerate,
                std::string(what) + ": all weights are zero; fall back to uniform sampling");
  }
  for (double& v : values) v /= sum;
}

// Inverse-CDF draw over the (possibly partially zeroed) weights. Scans in
// index order so results are reproducible everywhere.
std::size_t draw_index(std::mt19937_64& rng, const std::vector<double>& weights, double total) {
  double u = unit_uniform(rng) * total;
  double cum = 0.0;
  std::size_t last_nonzero = 0;
  bool any = false;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cum += weights[i];
    last_nonzero = i;
    any = true;
    if (u < cum) return i;
  }
  if (!any) throw Error(ErrorCode::Internal, "draw from empty distribution");
  return last_nonzero;  // u landed on the rounding tail
}

}  // namespace

WeightVector group_sampling_weights(std::span<const std::size_t> cardinalities, double lambda1) {
  if (lambda1 < 0.0) {
    throw Error(ErrorCode::Param, "lambda1 must be >= 0, got " + std::to_string(lambda1));
  }
  WeightVector w;
  w.kind = WeightKind::sampling;
  w.values.resize(cardinalities.size());
  for (std::size_t i = 0; i < cardinalities.size(); ++i) {
    if (cardinalities[i] == 0) {
      throw Error(ErrorCode::Contract, "empty group " + std::to_string(i));
    }
    w.values[i] = std::pow(static_cast<double>(cardinalities[i]), lambda1);
  }
  normalize_to_one(w.values, "group sampling weights");
  return w;
}

WeightVector ssim_sampling_weights(const WeightVector& s, double lambda2) {
  if (s.kind != WeightKind::self_sim) {
    throw Error(ErrorCode::Contract, "expected self_sim weights");
  }
  if (lambda2 < 0.0) {
    throw Error(ErrorCode::Param, "lambda2 must be >= 0, got " + std::to_string(lambda2));
  }
  validate(s);
  WeightVector w;
  w.kind = WeightKind::sampling;
  w.values.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    w.values[i] = std::pow(1.0 - s.values[i], lambda2);
  }
  normalize_to_one(w.values, "self-similarity sampling weights");
  return w;
}

WeightVector gmp_sampling_weights(const WeightVector& alpha, double lambda3) {
  validate(alpha);
  WeightVector w;
  w.kind = WeightKind::sampling;
  w.values.resize(alpha.size());
  double max_exponent = -std::numeric_limits<double>::infinity();
  for (double a : alpha.values) max_exponent = std::max(max_exponent, lambda3 * a);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    w.values[i] = std::exp(lambda3 * alpha.values[i] - max_exponent);
  }
  normalize_to_one(w.values, "gmp sampling weights");
  return w;
}

Instance draw_instance(const WeightVector& weights, std::size_t n_t, std::uint64_t seed) {
  if (weights.kind != WeightKind::sampling) {
    throw Error(ErrorCode::Contract, "expected sampling weights");
  }
  validate(weights);
  if (n_t == 0) throw Error(ErrorCode::Param, "n_t must be >= 1");
  std::size_t nonzero = 0;
  for (double v : weights.values) {
    if (v > 0.0) ++nonzero;
  }
  std::mt19937_64 rng(seed);
  Instance instance;
  instance.indices.reserve(n_t);
  if (n_t <= nonzero) {
    std::vector<double> remaining = weights.values;
    double total = 0.0;
    for (double v : remaining) total += v;
    for (std::size_t t = 0; t < n_t; ++t) {
      std::size_t pick = draw_index(rng, remaining, total);
      instance.indices.push_back(static_cast<std::uint32_t>(pick));
      total -= remaining[pick];
      remaining[pick] = 0.0;
    }
  } else {
    double total = 0.0;
    for (double v : weights.values) total += v;
    for (std::size_t t = 0; t < n_t; ++t) {
      std::size_t pick = draw_index(rng, weights.values, total);
      instance.indices.push_back(static_cast<std::uint32_t>(pick));
    }
  }
  return instance;
}

Instance draw_group_instance(const GroupPartition& partition, double lambda1,
                             std::size_t n_t, std::uint64_t seed) {
  validate(partition, partition.assignments.size());
  if (n_t == 0) throw Error(ErrorCode::Param, "n_t must be >= 1");
  const std::size_t n_q = partition.n_q();
  WeightVector group_weights = group_sampling_weights(partition.cardinalities, lambda1);

  std::vector<std::vector<std::uint32_t>> members(n_q);
  for (std::size_t i = 0; i < partition.assignments.size(); ++i) {
    members[partition.assignments[i]].push_back(static_cast<std::uint32_t>(i));
  }

  std::mt19937_64 rng(seed);
  // phase 1: pick the groups, without replacement while groups remain,
  // then with replacement from the full distribution
  std::vector<std::size_t> picked_groups;
  picked_groups.reserve(n_t);
  std::vector<double> remaining = group_weights.values;
  double total = 1.0;
  for (std::size_t t = 0; t < n_t; ++t) {
    if (t < n_q) {
      std::size_t pick = draw_index(rng, remaining, total);
      picked_groups.push_back(pick);
      total -= remaining[pick];
      remaining[pick] = 0.0;
    } else {
      picked_groups.push_back(draw_index(rng, group_weights.values, 1.0));
    }
  }
  // phase 2: one uniform element per selected group
  Instance instance;
  instance.indices.reserve(n_t);
  for (std::size_t g : picked_groups) {
    const auto& pool = members[g];
    auto slot = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(pool.size()));
    slot = std::min(slot, pool.size() - 1);
    instance.indices.push_back(pool[slot]);
  }
  return instance;
}

}  // namespace burst
