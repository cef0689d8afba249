#include "burst/types.hpp"

#include <cmath>
#include <numeric>

namespace burst {

const char* to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::attention: return "attention";
    case WeightKind::self_sim: return "self_sim";
    case WeightKind::gmp: return "gmp";
    case WeightKind::qagmp: return "qagmp";
    case WeightKind::sampling: return "sampling";
  }
  return "unknown";
}

WeightKind weight_kind_from_string(const std::string& name) {
  if (name == "attention") return WeightKind::attention;
  if (name == "self_sim") return WeightKind::self_sim;
  if (name == "gmp") return WeightKind::gmp;
  if (name == "qagmp") return WeightKind::qagmp;
  if (name == "sampling") return WeightKind::sampling;
  throw Error(ErrorCode::Format, "unknown weight kind '" + name + "'");
}

void validate(const WeightVector& w) {
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    if (!std::isfinite(w.values[i])) {
      throw Error(ErrorCode::Contract,
                  "weight vector has non-finite entry at index " + std::to_string(i));
    }
  }
  switch (w.kind) {
    case WeightKind::attention:
      for (std::size_t i = 0; i < w.values.size(); ++i) {
        if (w.values[i] <= 0.0 || w.values[i] >= 1.0) {
          throw Error(ErrorCode::Contract,
                      "attention weight outside (0,1) at index " + std::to_string(i));
        }
      }
      break;
    case WeightKind::self_sim:
      for (std::size_t i = 0; i < w.values.size(); ++i) {
        if (w.values[i] < -1.0 || w.values[i] > 1.0) {
          throw Error(ErrorCode::Contract,
                      "self-similarity outside [-1,1] at index " + std::to_string(i));
        }
      }
      break;
    case WeightKind::sampling: {
      double sum = 0.0;
      for (std::size_t i = 0; i < w.values.size(); ++i) {
        if (w.values[i] < 0.0) {
          throw Error(ErrorCode::Contract,
                      "negative sampling weight at index " + std::to_string(i));
        }
        sum += w.values[i];
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw Error(ErrorCode::Contract,
                    "sampling weights sum to " + std::to_string(sum) + ", expected 1");
      }
      break;
    }
    case WeightKind::gmp:
    case WeightKind::qagmp:
      break;  // unclamped by design
  }
}

}  // namespace burst
