#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "burst/types.hpp"

namespace burst {

// Synthetic benchmark with planted burstiness. Per identity a mean
// direction is drawn on the unit sphere; per mode a perturbed direction at
// distance mode_spread from the mean (perturbations orthogonalized while
// dimensions allow). Per set, mode ranks are permuted and elements are
// allocated to modes with Zipf(skew) probabilities; each element is the
// mode direction plus Gaussian noise, rescaled so its pre-normalization
// norm encodes quality when quality_noise_link > 0. Output is fully
// determined by (config, seed).
struct SynthConfig {
  std::size_t identities = 4;
  std::size_t sets_per_identity = 2;
  std::size_t d = 16;
  std::size_t modes_per_identity = 3;
  std::size_t elements_per_set = 20;
  double mode_cardinality_skew = 1.0;  // Zipf exponent over per-set mode ranks, >= 1
  double skew_gradient = 0.0;          // extra exponent ramped linearly across identities
  double mode_spread = 4.0;            // distance of mode directions from the identity mean
  double intra_mode_noise = 0.05;      // base per-coordinate Gaussian sigma, > 0
  double quality_noise_link = 0.0;     // >= 0; scales per-element noise and quality
  std::uint64_t seed = 0;
};

// key=value text, one entry per line, '#' comments allowed. Unknown keys
// and out-of-domain values are config errors.
SynthConfig load_synth_config(const std::filesystem::path& path);
void save_synth_config(const std::filesystem::path& path, const SynthConfig& config);

struct SynthOutput {
  std::filesystem::path manifest;
  std::filesystem::path pairs;           // empty when no valid 1:1 protocol exists
  std::filesystem::path identification;  // empty when no valid 1:N protocol exists
  std::filesystem::path truth_sets;      // CSV set_id,identity,redundancy
  std::filesystem::path truth_elements;  // CSV set_id,index,mode
  std::filesystem::path config_echo;
};

// Writes a benchmark directory consumable by every other subcommand:
// feature files + quality sidecars under sets/, a manifest, protocol files,
// and ground-truth sidecars (planted mode labels and per-set redundancy,
// the Simpson index of realized mode fractions).
SynthOutput generate(const SynthConfig& config, const std::filesystem::path& out_dir);

}  // namespace burst
