#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace burst {

// Draw helpers on top of std::mt19937_64. The standard distributions are
// implementation-defined, so reproducible output across platforms requires
// hand-rolled transforms from the raw 64-bit stream.

// Uniform double in [0, 1) with 53-bit resolution.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal pair via Box-Muller.
inline void gaussian_pair(std::mt19937_64& rng, double& z0, double& z1) {
  double u1 = 1.0 - unit_uniform(rng);  // (0, 1]
  double u2 = unit_uniform(rng);
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * 3.14159265358979323846 * u2;
  z0 = r * std::cos(theta);
  z1 = r * std::sin(theta);
}

// Fills out[0..n) with standard normals, consuming ceil(n/2) pairs.
inline void gaussian_fill(std::mt19937_64& rng, double* out, std::size_t n) {
  std::size_t i = 0;
  while (i + 1 < n) {
    gaussian_pair(rng, out[i], out[i + 1]);
    i += 2;
  }
  if (i < n) {
    double z0, z1;
    gaussian_pair(rng, z0, z1);
    out[i] = z0;
  }
}

}  // namespace burst
