#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "burst/types.hpp"

namespace burst {

struct LabeledScore {
  double score = 0.0;
  bool positive = false;
};

struct RocPoint {
  double threshold = 0.0;
  double tar = 0.0;
  double far = 0.0;
};

// Exact empirical ROC. Points are ordered by descending threshold starting
// at (+inf, 0, 0); tied scores share one operating point; the final point
// is always (1, 1).
struct RocCurve {
  std::vector<RocPoint> points;
};

// Requires at least one positive and one negative label.
RocCurve roc(std::span<const LabeledScore> scores);

// TAR at the largest operating point with FAR <= far_target; step
// semantics, no interpolation. far_target in (0, 1].
double tar_at_far(const RocCurve& curve, double far_target);

struct IdentificationResult {
  // (N, fraction of mated probes whose true identity ranks in the top N)
  std::vector<std::pair<std::size_t, double>> rank_hits;
  // (FPIR target, TPIR); empty when the protocol has no impostor probes
  std::vector<std::pair<double, double>> tpir;
  std::size_t mated_probes = 0;
  std::size_t impostor_probes = 0;
};

// Closed-set rank-N over mated probes plus open-set TPIR at the requested
// FPIR operating points (thresholds set by the impostor max-score
// distribution, same step semantics as tar_at_far). With closed_set = true
// any probe without a gallery mate is a protocol error.
IdentificationResult identification(const EvalProtocol& protocol,
                                    const std::map<std::string, SetRepresentation>& reps,
                                    std::span<const std::size_t> ranks,
                                    std::span<const double> fpir_targets,
                                    bool closed_set = false);

// Top-k set ids by descending burst degree, ties broken by lexicographic
// set_id. 1 <= k <= degrees.size().
std::vector<std::string> select_bursty_subset(
    std::vector<std::pair<std::string, double>> degrees, std::size_t k);

// Convenience overload: normalizes each set, builds its gram matrix and
// ranks by burst_degree.
std::vector<std::string> select_bursty_subset(std::span<const FeatureSet> sets, std::size_t k);

}  // namespace burst
