#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <doctest.h>

#include "burst/burstkit.hpp"
#include "burst/evalharness.hpp"
#include "burst/setio.hpp"
#include "support/oracles.hpp"

using burst::Error;
using burst::ErrorCode;
using burst::EvalProtocol;
using burst::FeatureSet;
using burst::LabeledScore;
using burst::Matrix;
using burst::RocCurve;
using burst::SetRepresentation;

namespace {

std::vector<LabeledScore> tied_random_scores(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<LabeledScore> scores(n);
  for (auto& s : scores) {
    // quantized grid forces threshold ties
    s.score = static_cast<double>(rng() % 41) / 40.0;
    s.positive = (rng() & 1) != 0;
  }
  // guarantee both classes
  scores[0] = {0.99, true};
  scores[1] = {0.01, false};
  return scores;
}

std::vector<std::pair<double, bool>> as_pairs(const std::vector<LabeledScore>& scores) {
  std::vector<std::pair<double, bool>> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.emplace_back(s.score, s.positive);
  return out;
}

SetRepresentation rep_of(std::string id, std::vector<double> v) {
  double norm = std::sqrt(oracle::dot(v, v));
  for (double& x : v) x /= norm;
  return {std::move(id), std::move(v), "mean"};
}

}  // namespace

TEST_CASE("roc on perfectly separated scores") {
  std::vector<LabeledScore> scores = {{0.9, true}, {0.1, false}};
  RocCurve curve = burst::roc(scores);
  REQUIRE(curve.points.size() == 3);
  CHECK(curve.points[0].tar == 0.0);
  CHECK(curve.points[0].far == 0.0);
  CHECK(curve.points[1].threshold == 0.9);
  CHECK(curve.points[1].tar == 1.0);
  CHECK(curve.points[1].far == 0.0);
  CHECK(curve.points[2].tar == 1.0);
  CHECK(curve.points[2].far == 1.0);
  CHECK(burst::tar_at_far(curve, 0.5) == 1.0);
}

TEST_CASE("roc with one shared score is a single step") {
  std::vector<LabeledScore> scores = {{0.5, true}, {0.5, false}, {0.5, true}};
  RocCurve curve = burst::roc(scores);
  REQUIRE(curve.points.size() == 2);
  CHECK(curve.points[0].tar == 0.0);
  CHECK(curve.points[0].far == 0.0);
  CHECK(curve.points[1].tar == 1.0);
  CHECK(curve.points[1].far == 1.0);
}

TEST_CASE("roc rejects single-class input") {
  std::vector<LabeledScore> scores = {{0.5, true}, {0.7, true}};
  try {
    burst::roc(scores);
    FAIL("expected protocol error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Protocol);
  }
}

TEST_CASE("roc matches the brute-force recount exactly on 1000 tied scores") {
  std::vector<LabeledScore> scores = tied_random_scores(1000, 5);
  RocCurve curve = burst::roc(scores);
  auto pairs = as_pairs(scores);
  std::set<double> unique;
  for (const auto& s : scores) unique.insert(s.score);
  CHECK(curve.points.size() == unique.size() + 1);
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    oracle::TarFar tf = oracle::count_at_threshold(pairs, curve.points[i].threshold);
    CHECK(curve.points[i].tar == tf.tar);
    CHECK(curve.points[i].far == tf.far);
  }
}

TEST_CASE("tar_at_far steps, edge cases, and parameter domain") {
  // negatives above the positives: no zero-FAR positives
  std::vector<LabeledScore> inverted = {{0.5, true}, {0.9, false}};
  RocCurve curve = burst::roc(inverted);
  CHECK(burst::tar_at_far(curve, 0.5) == 0.0);

  std::vector<LabeledScore> scores = tied_random_scores(500, 11);
  RocCurve random_curve = burst::roc(scores);
  auto pairs = as_pairs(scores);
  for (double target : {0.001, 0.01, 0.05, 0.1, 0.31, 0.73, 1.0}) {
    CHECK(burst::tar_at_far(random_curve, target) == oracle::tar_at_far_scan(pairs, target));
  }
  for (double target : {0.0, -0.1, 1.1}) {
    try {
      burst::tar_at_far(random_curve, target);
      FAIL("expected param error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Param);
    }
  }
}

TEST_CASE("property: tar and far are nondecreasing along the curve") {
  RocCurve curve = burst::roc(tied_random_scores(400, 21));
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].tar >= curve.points[i - 1].tar);
    CHECK(curve.points[i].far >= curve.points[i - 1].far);
    CHECK(curve.points[i].threshold < curve.points[i - 1].threshold);
  }
  CHECK(curve.points.back().tar == 1.0);
  CHECK(curve.points.back().far == 1.0);
  double previous = 0.0;
  for (double target : {0.01, 0.1, 0.2, 0.5, 1.0}) {
    double tar = burst::tar_at_far(curve, target);
    CHECK(tar >= previous);
    previous = tar;
  }
}

TEST_CASE("identification: gallery identical to probes is rank-1 perfect") {
  EvalProtocol protocol;
  std::map<std::string, SetRepresentation> reps;
  for (int i = 0; i < 3; ++i) {
    std::string identity = "id" + std::to_string(i);
    std::vector<double> v(4, 0.0);
    v[static_cast<std::size_t>(i)] = 1.0;
    reps.emplace("g" + std::to_string(i), rep_of("g" + std::to_string(i), v));
    reps.emplace("p" + std::to_string(i), rep_of("p" + std::to_string(i), v));
    protocol.entries.push_back({"g" + std::to_string(i), true, identity});
    protocol.entries.push_back({"p" + std::to_string(i), false, identity});
  }
  std::vector<std::size_t> ranks = {1, 2};
  auto result = burst::identification(protocol, reps, ranks, {});
  REQUIRE(result.rank_hits.size() == 2);
  CHECK(result.rank_hits[0].second == 1.0);
  CHECK(result.rank_hits[1].second == 1.0);
  CHECK(result.mated_probes == 3);
  CHECK(result.impostor_probes == 0);
}

TEST_CASE("identification: a decoy outranks an orthogonal probe") {
  EvalProtocol protocol;
  std::map<std::string, SetRepresentation> reps;
  reps.emplace("gA", rep_of("gA", {1.0, 0.0, 0.0}));
  reps.emplace("gB", rep_of("gB", {0.0, 1.0, 0.0}));
  // probe of identity A points at B's direction
  reps.emplace("p", rep_of("p", {0.1, 1.0, 0.0}));
  protocol.entries = {{"gA", true, "A"}, {"gB", true, "B"}, {"p", false, "A"}};
  std::vector<std::size_t> ranks = {1, 2};
  auto result = burst::identification(protocol, reps, ranks, {});
  CHECK(result.rank_hits[0].second == 0.0);
  CHECK(result.rank_hits[1].second == 1.0);
}

TEST_CASE("identification matches a brute-force oracle on a 20-identity benchmark") {
  std::mt19937_64 rng(31337);
  EvalProtocol protocol;
  std::map<std::string, SetRepresentation> reps;
  const std::size_t identities = 20, d = 16;
  std::vector<std::string> gallery_ids;
  for (std::size_t i = 0; i < identities; ++i) {
    std::string identity = "id" + std::to_string(i);
    FeatureSet noise = oracle::random_unit_set(3, d, 5000 + i);
    bool galleried = i < 16;  // last four identities are impostors
    if (galleried) {
      std::string gid = "g" + std::to_string(i);
      reps.emplace(gid, rep_of(gid, {noise.features.row(0), noise.features.row(0) + d}));
      protocol.entries.push_back({gid, true, identity});
      gallery_ids.push_back(gid);
    }
    std::string pid = "p" + std::to_string(i);
    // probes correlate with their gallery direction plus noise
    std::vector<double> v(d);
    for (std::size_t j = 0; j < d; ++j) {
      v[j] = noise.features(0, j) + 0.9 * noise.features(1, j);
    }
    reps.emplace(pid, rep_of(pid, v));
    protocol.entries.push_back({pid, false, identity});
  }
  std::vector<std::size_t> ranks = {1, 5};
  std::vector<double> fpirs = {0.25, 0.5, 1.0};
  auto result = burst::identification(protocol, reps, ranks, fpirs);

  // oracle: recompute everything with plain sorts
  struct Probe {
    std::string identity;
    std::vector<std::pair<double, std::string>> scored;  // (sim, gallery id)
    bool mated;
  };
  std::vector<Probe> probes;
  for (const auto& e : protocol.entries) {
    if (e.in_gallery) continue;
    Probe p;
    p.identity = e.identity;
    for (const auto& g : protocol.entries) {
      if (!g.in_gallery) continue;
      double sim = oracle::dot(reps.at(e.set_id).vector, reps.at(g.set_id).vector);
      p.scored.emplace_back(sim, g.set_id);
    }
    std::sort(p.scored.begin(), p.scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    p.mated = p.identity.size() > 2 && std::stoul(p.identity.substr(2)) < 16;
    probes.push_back(std::move(p));
  }
  auto identity_of_gallery = [](const std::string& gid) { return "id" + gid.substr(1); };
  std::size_t mated_total = 0;
  for (const Probe& p : probes) mated_total += p.mated ? 1 : 0;
  for (auto [n, rate] : result.rank_hits) {
    std::size_t hits = 0;
    for (const Probe& p : probes) {
      if (!p.mated) continue;
      for (std::size_t r = 0; r < std::min(n, p.scored.size()); ++r) {
        if (identity_of_gallery(p.scored[r].second) == p.identity) {
          ++hits;
          break;
        }
      }
    }
    CHECK(rate == static_cast<double>(hits) / static_cast<double>(mated_total));
  }
  for (auto [target, rate] : result.tpir) {
    double best = 0.0;
    std::vector<double> thresholds = {std::numeric_limits<double>::infinity()};
    for (const Probe& p : probes) {
      if (!p.mated) thresholds.push_back(p.scored.front().first);
    }
    for (double t : thresholds) {
      std::size_t false_pos = 0, impostors = 0, hits = 0;
      for (const Probe& p : probes) {
        if (!p.mated) {
          ++impostors;
          if (p.scored.front().first >= t) ++false_pos;
        } else if (p.scored.front().first >= t &&
                   identity_of_gallery(p.scored.front().second) == p.identity) {
          ++hits;
        }
      }
      if (static_cast<double>(false_pos) / static_cast<double>(impostors) <= target) {
        best = std::max(best, static_cast<double>(hits) / static_cast<double>(mated_total));
      }
    }
    CHECK(rate == best);
  }
}

TEST_CASE("identification protocol errors") {
  EvalProtocol protocol;
  std::map<std::string, SetRepresentation> reps;
  reps.emplace("g1", rep_of("g1", {1.0, 0.0}));
  reps.emplace("g2", rep_of("g2", {0.0, 1.0}));
  reps.emplace("p1", rep_of("p1", {1.0, 0.1}));
  std::vector<std::size_t> ranks = {1};

  protocol.entries = {{"g1", true, "A"}, {"g2", true, "A"}, {"p1", false, "A"}};
  try {
    burst::identification(protocol, reps, ranks, {});
    FAIL("expected protocol error (duplicate gallery identity)");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Protocol);
  }

  protocol.entries = {{"g1", true, "A"}, {"ghost", false, "A"}};
  try {
    burst::identification(protocol, reps, ranks, {});
    FAIL("expected protocol error (missing representation)");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Protocol);
  }

  protocol.entries = {{"g1", true, "A"}, {"p1", false, "B"}};
  try {
    burst::identification(protocol, reps, ranks, {}, /*closed_set=*/true);
    FAIL("expected protocol error (unmated probe in closed-set mode)");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Protocol);
  }
}

TEST_CASE("select_bursty_subset puts the all-duplicate set first") {
  std::vector<FeatureSet> sets;
  FeatureSet dup;
  dup.set_id = "dup";
  dup.features = Matrix(4, 4);
  for (std::size_t i = 0; i < 4; ++i) dup.features(i, 0) = 1.0;
  sets.push_back(dup);
  for (int s = 0; s < 3; ++s) {
    FeatureSet ortho;
    ortho.set_id = "ortho" + std::to_string(s);
    ortho.features = Matrix(4, 4);
    for (std::size_t i = 0; i < 4; ++i) ortho.features(i, i) = 1.0;
    sets.push_back(ortho);
  }
  auto top = burst::select_bursty_subset(sets, 1);
  REQUIRE(top.size() == 1);
  CHECK(top[0] == "dup");

  auto all = burst::select_bursty_subset(sets, 4);
  CHECK(all[0] == "dup");
  // the orthogonal sets tie and fall back to lexicographic order
  CHECK(all[1] == "ortho0");
  CHECK(all[2] == "ortho1");
  CHECK(all[3] == "ortho2");
}

TEST_CASE("select_bursty_subset: full ordering is by descending degree") {
  std::vector<std::pair<std::string, double>> degrees = {
      {"a", 0.3}, {"b", 0.9}, {"c", 0.5}, {"d", 0.1}};
  auto order = burst::select_bursty_subset(degrees, 4);
  CHECK(order == std::vector<std::string>{"b", "c", "a", "d"});
}

TEST_CASE("select_bursty_subset parameter domain") {
  std::vector<std::pair<std::string, double>> degrees = {{"a", 0.3}};
  for (std::size_t k : {std::size_t{0}, std::size_t{2}}) {
    try {
      burst::select_bursty_subset(degrees, k);
      FAIL("expected param error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Param);
    }
  }
}

TEST_CASE("property: duplicating every set's rows leaves the burst ranking unchanged") {
  std::vector<FeatureSet> sets;
  for (std::uint64_t s = 0; s < 6; ++s) {
    FeatureSet set = oracle::random_unit_set(5 + s, 8, 9090 + s);
    set.set_id = "s" + std::to_string(s);
    sets.push_back(std::move(set));
  }
  std::vector<FeatureSet> doubled;
  for (const FeatureSet& set : sets) {
    FeatureSet twice;
    twice.set_id = set.set_id;
    twice.features = Matrix(2 * set.size(), set.dim());
    for (std::size_t i = 0; i < set.size(); ++i) {
      for (std::size_t j = 0; j < set.dim(); ++j) {
        twice.features(i, j) = set.features(i, j);
        twice.features(i + set.size(), j) = set.features(i, j);
      }
    }
    doubled.push_back(std::move(twice));
  }
  CHECK(burst::select_bursty_subset(sets, 6) == burst::select_bursty_subset(doubled, 6));
}
