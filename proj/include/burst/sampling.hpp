#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "burst/quickshift.hpp"
#include "burst/types.hpp"

namespace burst {

// A training instance: n_t element indices drawn from one set. Repeats can
// occur only through the with-replacement fallback when n_t exceeds the
// number of drawable elements.
struct Instance {
  std::string set_id;
  std::vector<std::uint32_t> indices;
};

// w_i = c_i^lambda1, normalized to sum 1. lambda1 = 0 is uniform over
// groups, lambda1 = 1 reproduces vanilla per-element sampling.
WeightVector group_sampling_weights(std::span<const std::size_t> cardinalities, double lambda1);

// w_i = (1 - S_i)^lambda2, normalized. Throws Error(Degenerate) when every
// weight is zero (a fully bursty set); callers may then fall back to
// uniform sampling explicitly.
WeightVector ssim_sampling_weights(const WeightVector& s, double lambda2);

// w_i = exp(lambda3 * alpha_i), computed with a max-shifted exponent so the
// normalized result is always finite.
WeightVector gmp_sampling_weights(const WeightVector& alpha, double lambda3);

// Draws n_t element indices. Weighted without replacement (sequential draw
// and renormalize) while enough nonzero-weight elements remain; with
// replacement otherwise. Deterministic for a fixed seed.
Instance draw_instance(const WeightVector& weights, std::size_t n_t, std::uint64_t seed);

// Selects n_t groups by cardinality weights (without replacement while
// groups remain, then with replacement), then one uniform element per
// selected group.
Instance draw_group_instance(const GroupPartition& partition, double lambda1,
                             std::size_t n_t, std::uint64_t seed);

}  // namespace burst
