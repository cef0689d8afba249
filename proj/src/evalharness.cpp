#include "burst/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "burst/aggregate.hpp"
#include "burst/burstkit.hpp"
#include "burst/setio.hpp"

namespace burst {

RocCurve roc(std::span<const LabeledScore> scores) {
  std::size_t positives = 0;
  for (const LabeledScore& s : scores) {
    if (!std::isfinite(s.score)) throw Error(ErrorCode::Data, "non-finite score");
    if (s.positive) ++positives;
  }
  std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::Protocol, "ROC needs at least one positive and one negative score");
  }
  std::vector<LabeledScore> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledScore& a, const LabeledScore& b) { return a.score > b.score; });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0, i = 0;
  while (i < sorted.size()) {
    double threshold = sorted[i].score;
    while (i < sorted.size() && sorted[i].score == threshold) {
      if (sorted[i].positive) {
        ++tp;
      } else {
        ++fp;
      }
      ++i;
    }
    curve.points.push_back({threshold, static_cast<double>(tp) / static_cast<double>(positives),
                            static_cast<double>(fp) / static_cast<double>(negatives)});
  }
  return curve;
}

double tar_at_far(const RocCurve& curve, double far_target) {
  if (!(far_target > 0.0) || far_target > 1.0) {
    throw Error(ErrorCode::Param,
                "far_target must be in (0,1], got " + std::to_string(far_target));
  }
  if (curve.points.empty()) throw Error(ErrorCode::Contract, "empty ROC curve");
  double tar = 0.0;
  for (const RocPoint& p : curve.points) {
    if (p.far <= far_target) tar = p.tar;  // far is nondecreasing along the curve
  }
  return tar;
}

IdentificationResult identification(const EvalProtocol& protocol,
                                    const std::map<std::string, SetRepresentation>& reps,
                                    std::span<const std::size_t> ranks,
                                    std::span<const double> fpir_targets,
                                    bool closed_set) {
  std::vector<const IdentificationEntry*> gallery;
  std::vector<const IdentificationEntry*> probes;
  std::set<std::string> gallery_identities;
  for (const IdentificationEntry& e : protocol.entries) {
    if (!reps.contains(e.set_id)) {
      throw Error(ErrorCode::Protocol, "no representation for set '" + e.set_id + "'");
    }
    if (e.in_gallery) {
      if (!gallery_identities.insert(e.identity).second) {
        throw Error(ErrorCode::Protocol,
                    "duplicate gallery identity '" + e.identity + "'");
      }
      gallery.push_back(&e);
    } else {
      probes.push_back(&e);
    }
  }
  if (gallery.empty() || probes.empty()) {
    throw Error(ErrorCode::Protocol, "identification needs both gallery and probe sets");
  }

  struct ProbeOutcome {
    bool mated = false;
    std::size_t true_rank = 0;   // only meaningful when mated
    double top_score = 0.0;
    bool top_correct = false;
  };
  std::vector<ProbeOutcome> outcomes(probes.size());

#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t pi = 0; pi < static_cast<std::ptrdiff_t>(probes.size()); ++pi) {
    const IdentificationEntry& probe = *probes[static_cast<std::size_t>(pi)];
    const SetRepresentation& probe_rep = reps.at(probe.set_id);
    std::vector<std::pair<double, const IdentificationEntry*>> scored;
    scored.reserve(gallery.size());
    for (const IdentificationEntry* g : gallery) {
      scored.emplace_back(pairwise_similarity(probe_rep, reps.at(g->set_id)), g);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second->set_id < b.second->set_id;
    });
    ProbeOutcome& out = outcomes[static_cast<std::size_t>(pi)];
    out.top_score = scored.front().first;
    out.top_correct = scored.front().second->identity == probe.identity;
    out.mated = gallery_identities.contains(probe.identity);
    if (out.mated) {
      for (std::size_t r = 0; r < scored.size(); ++r) {
        if (scored[r].second->identity == probe.identity) {
          out.true_rank = r;
          break;
        }
      }
    }
  }

  std::size_t mated = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].mated) {
      ++mated;
    } else if (closed_set) {
      throw Error(ErrorCode::Protocol, "probe '" + probes[i]->set_id +
                                           "' has no gallery mate in closed-set mode");
    }
  }
  std::size_t impostors = outcomes.size() - mated;

  IdentificationResult result;
  result.mated_probes = mated;
  result.impostor_probes = impostors;
  if (mated > 0) {
    for (std::size_t n : ranks) {
      std::size_t hits = 0;
      for (const ProbeOutcome& out : outcomes) {
        if (out.mated && out.true_rank < n) ++hits;
      }
      result.rank_hits.emplace_back(n, static_cast<double>(hits) / static_cast<double>(mated));
    }
  }
  if (mated > 0 && impostors > 0 && !fpir_targets.empty()) {
    std::vector<double> impostor_scores;
    impostor_scores.reserve(impostors);
    for (const ProbeOutcome& out : outcomes) {
      if (!out.mated) impostor_scores.push_back(out.top_score);
    }
    std::sort(impostor_scores.begin(), impostor_scores.end(), std::greater<>());
    // operating thresholds: +inf, then each unique impostor score
    std::vector<double> thresholds = {std::numeric_limits<double>::infinity()};
    for (double s : impostor_scores) {
      if (thresholds.back() != s) thresholds.push_back(s);
    }
    auto fpir_at = [&](double threshold) {
      std::size_t count = 0;
      for (double s : impostor_scores) {
        if (s >= threshold) ++count;
      }
      return static_cast<double>(count) / static_cast<double>(impostors);
    };
    auto tpir_at = [&](double threshold) {
      std::size_t count = 0;
      for (const ProbeOutcome& out : outcomes) {
        if (out.mated && out.top_correct && out.top_score >= threshold) ++count;
      }
      return static_cast<double>(count) / static_cast<double>(mated);
    };
    for (double target : fpir_targets) {
      if (!(target > 0.0) || target > 1.0) {
        throw Error(ErrorCode::Param,
                    "fpir target must be in (0,1], got " + std::to_string(target));
      }
      double chosen = thresholds.front();
      for (double t : thresholds) {
        if (fpir_at(t) <= target) chosen = t;  // thresholds descend, fpir rises
      }
      result.tpir.emplace_back(target, tpir_at(chosen));
    }
  }
  return result;
}

std::vector<std::string> select_bursty_subset(
    std::vector<std::pair<std::string, double>> degrees, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::Param, "k must be >= 1");
  if (k > degrees.size()) {
    throw Error(ErrorCode::Param, "k=" + std::to_string(k) + " exceeds the " +
                                      std::to_string(degrees.size()) + " available sets");
  }
  std::sort(degrees.begin(), degrees.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> ids;
  ids.reserve(k);
  for (std::size_t i = 0; i < k; ++i) ids.push_back(std::move(degrees[i].first));
  return ids;
}

std::vector<std::string> select_bursty_subset(std::span<const FeatureSet> sets, std::size_t k) {
  std::vector<std::pair<std::string, double>> degrees(sets.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(sets.size()); ++i) {
    const FeatureSet& set = sets[static_cast<std::size_t>(i)];
    degrees[static_cast<std::size_t>(i)] = {set.set_id, burst_degree(gram(normalize(set)))};
  }
  return select_bursty_subset(std::move(degrees), k);
}

}  // namespace burst
