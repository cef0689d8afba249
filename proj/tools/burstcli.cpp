// burstcli: synth -> detect -> sample -> aggregate -> evaluate ->
// select-bursty -> pipeline over feature-set benchmarks.
//
// Exit codes: 0 success, 1 data error, 2 usage error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "burst/aggregate.hpp"
#include "burst/burstkit.hpp"
#include "burst/evalharness.hpp"
#include "burst/quickshift.hpp"
#include "burst/sampling.hpp"
#include "burst/setio.hpp"
#include "burst/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int exit_code_for(burst::ErrorCode code) {
  switch (code) {
    case burst::ErrorCode::Param:
    case burst::ErrorCode::Config:
      return 2;
    default:
      return 1;
  }
}

// Runs fn(i) for i in [0, n) on the OpenMP pool; the first failure is
// rethrown after the region so errors cannot escape a worker thread.
template <typename Fn>
void parallel_for_sets(std::size_t n, Fn&& fn) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

struct CommonOpts {
  std::string manifest;
  std::string out;
  burst::HyperParams params;
  std::string quality_source = "auto";
  double power = 0.5;
};

void check_params(const burst::HyperParams& p) {
  if (!(p.lambda > 0.0)) {
    throw burst::Error(burst::ErrorCode::Param, "--lambda must be > 0");
  }
  if (p.lambda1 < 0.0) throw burst::Error(burst::ErrorCode::Param, "--lambda1 must be >= 0");
  if (p.lambda2 < 0.0) throw burst::Error(burst::ErrorCode::Param, "--lambda2 must be >= 0");
  if (p.lambda4 < 0.0) throw burst::Error(burst::ErrorCode::Param, "--lambda4 must be >= 0");
  if (p.beta < 0.0 || p.beta >= 1.0) {
    throw burst::Error(burst::ErrorCode::Param, "--beta must be in [0,1)");
  }
  if (p.n_t == 0) throw burst::Error(burst::ErrorCode::Param, "--n-t must be >= 1");
}

json params_json(const burst::HyperParams& p) {
  return json{{"lambda", p.lambda},   {"lambda1", p.lambda1}, {"lambda2", p.lambda2},
              {"lambda3", p.lambda3}, {"lambda4", p.lambda4}, {"n_t", p.n_t},
              {"k", p.k},             {"beta", p.beta}};
}

void write_run_config(const fs::path& out_dir, const std::string& subcommand, json extra) {
  extra["subcommand"] = subcommand;
  std::ofstream out(out_dir / "run_config.json", std::ios::trunc);
  out << extra.dump(2) << '\n';
}

// Loads every manifest entry and unit-normalizes the rows; raw norms stay
// available for the norm_proxy quality source.
std::vector<burst::FeatureSet> load_normalized_sets(const std::string& manifest_path,
                                                    std::vector<burst::ManifestEntry>* entries_out) {
  std::vector<burst::ManifestEntry> entries = burst::load_manifest(manifest_path);
  std::vector<burst::FeatureSet> sets(entries.size());
  parallel_for_sets(entries.size(), [&](std::size_t i) {
    try {
      sets[i] = burst::normalize(burst::load_set(entries[i]));
    } catch (const burst::Error& e) {
      throw burst::Error(e.code(), "set '" + entries[i].set_id + "': " + e.what());
    }
  });
  if (entries_out) *entries_out = std::move(entries);
  return sets;
}

burst::WeightVector resolve_quality(const burst::FeatureSet& set, const std::string& source) {
  if (source == "auto") {
    return burst::quality_scores(set, set.quality.empty() ? burst::QualitySource::uniform
                                                          : burst::QualitySource::manifest);
  }
  return burst::quality_scores(set, burst::quality_source_from_string(source));
}

burst::SetRepresentation compute_representation(const burst::FeatureSet& set,
                                                const std::string& method,
                                                const burst::HyperParams& params,
                                                const std::string& quality_source,
                                                double power) {
  burst::SetRepresentation rep;
  if (method == "mean") {
    burst::WeightVector uniform;
    uniform.kind = burst::WeightKind::sampling;
    uniform.values.assign(set.size(), 1.0 / static_cast<double>(set.size()));
    rep = burst::weighted_aggregate(set, std::span(&uniform, 1));
  } else if (method == "attention") {
    burst::WeightVector att = resolve_quality(set, quality_source);
    rep = burst::weighted_aggregate(set, std::span(&att, 1));
  } else if (method == "pnorm") {
    burst::WeightVector att = resolve_quality(set, quality_source);
    rep = burst::weighted_aggregate(set, std::span(&att, 1));
    rep.vector = burst::power_normalize(rep.vector, power);
  } else if (method == "ssim") {
    burst::WeightVector att = resolve_quality(set, quality_source);
    burst::GramMatrix k = burst::gram(set);
    burst::WeightVector w =
        burst::ssim_sampling_weights(burst::self_similarity(k), params.lambda2);
    std::vector<burst::WeightVector> weights = {std::move(att), std::move(w)};
    rep = burst::weighted_aggregate(set, weights);
  } else if (method == "gmp") {
    burst::WeightVector att = resolve_quality(set, quality_source);
    burst::GramMatrix k = burst::gram(set);
    burst::WeightVector alpha = burst::gmp_weights(k, params.lambda);
    std::vector<burst::WeightVector> weights = {std::move(att), std::move(alpha)};
    rep = burst::weighted_aggregate(set, weights);
  } else if (method == "qagmp") {
    burst::WeightVector att = resolve_quality(set, quality_source);
    burst::GramMatrix k = burst::gram(set);
    burst::WeightVector alpha = burst::qagmp_weights(k, params.lambda, params.lambda4, att);
    std::vector<burst::WeightVector> weights = {std::move(att), std::move(alpha)};
    rep = burst::weighted_aggregate(set, weights);
  } else if (method == "two-stage") {
    burst::GroupPartition partition = burst::quickshiftpp(set, params.k, params.beta);
    rep = burst::two_stage_aggregate(set, partition);
  } else {
    throw burst::Error(burst::ErrorCode::Param, "unknown method '" + method + "'");
  }
  rep.set_id = set.set_id;
  rep.method = method;
  return rep;
}

void write_metrics(const fs::path& out_dir, const std::vector<burst::LabeledScore>& scores,
                   const burst::EvalProtocol& protocol,
                   const std::map<std::string, burst::SetRepresentation>& reps,
                   const std::vector<double>& fars, const std::vector<std::size_t>& ranks,
                   const std::vector<double>& fpirs, json run_meta) {
  json metrics;
  if (!scores.empty()) {
    burst::RocCurve curve = burst::roc(scores);
    json tar;
    for (double far : fars) tar[format_short(far)] = burst::tar_at_far(curve, far);
    metrics["tar"] = tar;
    metrics["pairs"] = scores.size();
    std::ofstream roc_out(out_dir / "roc.csv", std::ios::trunc);
    roc_out << "threshold,tar,far\n";
    for (const burst::RocPoint& p : curve.points) {
      roc_out << format_double(p.threshold) << ',' << format_double(p.tar) << ','
              << format_double(p.far) << '\n';
    }
  }
  if (!protocol.entries.empty()) {
    burst::IdentificationResult id =
        burst::identification(protocol, reps, ranks, fpirs);
    json rank;
    for (const auto& [n, rate] : id.rank_hits) rank[std::to_string(n)] = rate;
    metrics["rank"] = rank;
    json tpir;
    for (const auto& [target, rate] : id.tpir) tpir[format_short(target)] = rate;
    metrics["tpir"] = tpir;
    metrics["mated_probes"] = id.mated_probes;
    metrics["impostor_probes"] = id.impostor_probes;
  }
  metrics["run"] = std::move(run_meta);
  std::ofstream out(out_dir / "metrics.json", std::ios::trunc);
  out << metrics.dump(2) << '\n';
}

struct RepsEntry {
  std::string set_id;
  std::string identity;
  std::string file;
  std::string method;
};

void save_reps(const fs::path& out_dir, const std::vector<burst::ManifestEntry>& entries,
               const std::vector<burst::SetRepresentation>& reps) {
  fs::create_directories(out_dir / "reps");
  std::ofstream index(out_dir / "reps.csv", std::ios::trunc);
  index << "set_id,identity,file,method\n";
  for (std::size_t i = 0; i < reps.size(); ++i) {
    std::string rel = "reps/" + reps[i].set_id + ".bset";
    burst::FeatureSet one;
    one.set_id = reps[i].set_id;
    one.features = burst::Matrix(1, reps[i].dim());
    for (std::size_t j = 0; j < reps[i].dim(); ++j) one.features(0, j) = reps[i].vector[j];
    burst::save_feature_set(out_dir / rel, one);
    index << reps[i].set_id << ',' << entries[i].identity << ',' << rel << ','
          << reps[i].method << '\n';
  }
}

std::map<std::string, burst::SetRepresentation> load_reps(const fs::path& reps_csv) {
  std::ifstream in(reps_csv);
  if (!in) {
    throw burst::Error(burst::ErrorCode::Resolution, "cannot open " + reps_csv.string());
  }
  std::string line;
  if (!std::getline(in, line) ||
      (line != "set_id,identity,file,method" && line != "set_id,identity,file,method\r")) {
    throw burst::Error(burst::ErrorCode::Format,
                       reps_csv.string() + ": expected header 'set_id,identity,file,method'");
  }
  std::map<std::string, burst::SetRepresentation> reps;
  fs::path base = reps_csv.parent_path();
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    fields.push_back(cur);
    if (fields.size() != 4) {
      throw burst::Error(burst::ErrorCode::Format,
                         reps_csv.string() + ": expected 4 fields per row");
    }
    burst::FeatureSet one = burst::load_feature_set(base / fields[2]);
    burst::SetRepresentation rep;
    rep.set_id = fields[0];
    rep.method = fields[3];
    rep.vector.assign(one.features.row(0), one.features.row(0) + one.dim());
    reps.emplace(fields[0], std::move(rep));
  }
  return reps;
}

std::vector<burst::LabeledScore> score_pairs(
    const std::vector<burst::VerificationPair>& pairs,
    const std::map<std::string, burst::SetRepresentation>& reps) {
  std::vector<burst::LabeledScore> scores(pairs.size());
  parallel_for_sets(pairs.size(), [&](std::size_t i) {
    auto a = reps.find(pairs[i].a);
    auto b = reps.find(pairs[i].b);
    if (a == reps.end() || b == reps.end()) {
      throw burst::Error(burst::ErrorCode::Resolution,
                         "pair (" + pairs[i].a + "," + pairs[i].b +
                             ") references a set without a representation");
    }
    scores[i] = {burst::pairwise_similarity(a->second, b->second), pairs[i].same};
  });
  return scores;
}

// ---------------------------------------------------------------- commands

void cmd_synth(const std::string& config_path, const std::string& out) {
  burst::SynthConfig config = burst::load_synth_config(config_path);
  fs::create_directories(out);
  burst::generate(config, out);
  write_run_config(out, "synth", json{{"config", config_path}});
  std::cout << "wrote benchmark to " << out << "\n";
}

void cmd_detect(const CommonOpts& opts, const std::string& method) {
  check_params(opts.params);
  std::vector<burst::ManifestEntry> entries;
  std::vector<burst::FeatureSet> sets = load_normalized_sets(opts.manifest, &entries);
  fs::create_directories(opts.out);
  const bool is_partition = method == "qshift";
  fs::create_directories(fs::path(opts.out) / (is_partition ? "partitions" : "weights"));

  struct Row {
    std::size_t n = 0;
    double degree = 0.0;
    std::size_t n_q = 0;
  };
  std::vector<Row> rows(sets.size());
  std::vector<burst::WeightVector> weights(sets.size());
  std::vector<burst::GroupPartition> partitions(sets.size());
  parallel_for_sets(sets.size(), [&](std::size_t i) {
    try {
      const burst::FeatureSet& set = sets[i];
      burst::GramMatrix k = burst::gram(set);
      rows[i].n = set.size();
      rows[i].degree = burst::burst_degree(k);
      if (method == "ssim") {
        weights[i] = burst::self_similarity(k);
      } else if (method == "gmp") {
        weights[i] = burst::gmp_weights(k, opts.params.lambda);
      } else if (method == "qagmp") {
        weights[i] = burst::qagmp_weights(k, opts.params.lambda, opts.params.lambda4,
                                          resolve_quality(set, opts.quality_source));
      } else {
        partitions[i] = burst::quickshiftpp(set, opts.params.k, opts.params.beta);
        rows[i].n_q = partitions[i].n_q();
      }
    } catch (const burst::Error& e) {
      throw burst::Error(e.code(), "set '" + sets[i].set_id + "': " + e.what());
    }
  });

  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (is_partition) {
      burst::save_partition(fs::path(opts.out) / "partitions" / (sets[i].set_id + ".csv"),
                            partitions[i].assignments);
    } else {
      burst::save_weights(fs::path(opts.out) / "weights" / (sets[i].set_id + ".csv"),
                          weights[i]);
    }
  }
  std::ofstream summary(fs::path(opts.out) / "summary.csv", std::ios::trunc);
  summary << (is_partition ? "set_id,n,burst_degree,n_q\n" : "set_id,n,burst_degree\n");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    summary << sets[i].set_id << ',' << rows[i].n << ',' << format_double(rows[i].degree);
    if (is_partition) summary << ',' << rows[i].n_q;
    summary << '\n';
  }
  write_run_config(opts.out, "detect",
                   json{{"manifest", opts.manifest},
                        {"method", method},
                        {"quality_source", opts.quality_source},
                        {"params", params_json(opts.params)}});
  std::cout << "detected " << sets.size() << " sets with method " << method << "\n";
}

void cmd_sample(const CommonOpts& opts, const std::string& strategy, std::uint64_t seed) {
  check_params(opts.params);
  std::vector<burst::ManifestEntry> entries;
  std::vector<burst::FeatureSet> sets = load_normalized_sets(opts.manifest, &entries);
  fs::create_directories(opts.out);
  std::vector<burst::Instance> instances(sets.size());
  parallel_for_sets(sets.size(), [&](std::size_t i) {
    try {
      const burst::FeatureSet& set = sets[i];
      std::uint64_t set_seed = seed + i;  // one decorrelated stream per set
      if (strategy == "qshift") {
        burst::GroupPartition partition =
            burst::quickshiftpp(set, opts.params.k, opts.params.beta);
        instances[i] =
            burst::draw_group_instance(partition, opts.params.lambda1, opts.params.n_t, set_seed);
      } else {
        burst::WeightVector w;
        if (strategy == "vanilla") {
          w.kind = burst::WeightKind::sampling;
          w.values.assign(set.size(), 1.0 / static_cast<double>(set.size()));
        } else if (strategy == "ssim") {
          burst::GramMatrix k = burst::gram(set);
          w = burst::ssim_sampling_weights(burst::self_similarity(k), opts.params.lambda2);
        } else {
          burst::GramMatrix k = burst::gram(set);
          w = burst::gmp_sampling_weights(burst::gmp_weights(k, opts.params.lambda),
                                          opts.params.lambda3);
        }
        instances[i] = burst::draw_instance(w, opts.params.n_t, set_seed);
      }
      instances[i].set_id = set.set_id;
    } catch (const burst::Error& e) {
      throw burst::Error(e.code(), "set '" + sets[i].set_id + "': " + e.what());
    }
  });
  std::ofstream out(fs::path(opts.out) / "instances.csv", std::ios::trunc);
  out << "set_id";
  for (std::size_t t = 0; t < opts.params.n_t; ++t) out << ",idx" << t;
  out << '\n';
  for (const burst::Instance& inst : instances) {
    out << inst.set_id;
    for (std::uint32_t idx : inst.indices) out << ',' << idx;
    out << '\n';
  }
  write_run_config(opts.out, "sample",
                   json{{"manifest", opts.manifest},
                        {"strategy", strategy},
                        {"seed", seed},
                        {"params", params_json(opts.params)}});
  std::cout << "sampled " << instances.size() << " instances with strategy " << strategy << "\n";
}

void cmd_aggregate(const CommonOpts& opts, const std::string& method) {
  check_params(opts.params);
  std::vector<burst::ManifestEntry> entries;
  std::vector<burst::FeatureSet> sets = load_normalized_sets(opts.manifest, &entries);
  fs::create_directories(opts.out);
  std::vector<burst::SetRepresentation> reps(sets.size());
  parallel_for_sets(sets.size(), [&](std::size_t i) {
    try {
      reps[i] = compute_representation(sets[i], method, opts.params, opts.quality_source,
                                       opts.power);
    } catch (const burst::Error& e) {
      throw burst::Error(e.code(), "set '" + sets[i].set_id + "': " + e.what());
    }
  });
  save_reps(opts.out, entries, reps);
  write_run_config(opts.out, "aggregate",
                   json{{"manifest", opts.manifest},
                        {"method", method},
                        {"quality_source", opts.quality_source},
                        {"power", opts.power},
                        {"params", params_json(opts.params)}});
  std::cout << "aggregated " << reps.size() << " sets with method " << method << "\n";
}

void cmd_evaluate(const std::string& manifest, const std::string& reps_csv,
                  const std::string& pairs_path, const std::string& idproto_path,
                  const std::string& out, const std::vector<double>& fars,
                  const std::vector<std::size_t>& ranks, const std::vector<double>& fpirs) {
  std::vector<burst::ManifestEntry> entries = burst::load_manifest(manifest);
  std::map<std::string, burst::SetRepresentation> reps = load_reps(reps_csv);
  burst::EvalProtocol protocol;
  if (!pairs_path.empty()) protocol.pairs = burst::load_pairs(pairs_path);
  if (!idproto_path.empty()) protocol.entries = burst::load_identification(idproto_path);
  if (protocol.pairs.empty() && protocol.entries.empty()) {
    throw burst::Error(burst::ErrorCode::Param, "provide --pairs and/or --idproto");
  }
  burst::validate_protocol(protocol, entries);
  fs::create_directories(out);
  std::vector<burst::LabeledScore> scores = score_pairs(protocol.pairs, reps);
  write_metrics(out, scores, protocol, reps, fars, ranks, fpirs,
                json{{"manifest", manifest}, {"reps", reps_csv}});
  write_run_config(out, "evaluate",
                   json{{"manifest", manifest},
                        {"reps", reps_csv},
                        {"pairs", pairs_path},
                        {"idproto", idproto_path}});
  std::cout << "evaluated " << scores.size() << " pairs, " << protocol.entries.size()
            << " identification entries\n";
}

void cmd_select_bursty(const std::string& manifest, std::size_t k, const std::string& out) {
  std::vector<burst::ManifestEntry> entries;
  std::vector<burst::FeatureSet> sets = load_normalized_sets(manifest, &entries);
  std::vector<std::pair<std::string, double>> degrees(sets.size());
  parallel_for_sets(sets.size(), [&](std::size_t i) {
    degrees[i] = {sets[i].set_id, burst::burst_degree(burst::gram(sets[i]))};
  });
  std::map<std::string, double> degree_of(degrees.begin(), degrees.end());
  std::vector<std::string> selected = burst::select_bursty_subset(std::move(degrees), k);
  fs::create_directories(out);
  std::ofstream csv(fs::path(out) / "bursty.csv", std::ios::trunc);
  csv << "set_id,burst_degree\n";
  for (const std::string& id : selected) {
    csv << id << ',' << format_double(degree_of.at(id)) << '\n';
  }
  write_run_config(out, "select-bursty", json{{"manifest", manifest}, {"k", k}});
  std::cout << "selected top " << k << " bursty sets\n";
}

void cmd_pipeline(const CommonOpts& opts, const std::string& method,
                  const std::string& pairs_path, const std::string& idproto_path,
                  const std::vector<double>& fars, const std::vector<std::size_t>& ranks,
                  const std::vector<double>& fpirs) {
  check_params(opts.params);
  std::vector<burst::ManifestEntry> entries;
  std::vector<burst::FeatureSet> sets = load_normalized_sets(opts.manifest, &entries);
  burst::EvalProtocol protocol;
  if (!pairs_path.empty()) protocol.pairs = burst::load_pairs(pairs_path);
  if (!idproto_path.empty()) protocol.entries = burst::load_identification(idproto_path);
  if (protocol.pairs.empty() && protocol.entries.empty()) {
    throw burst::Error(burst::ErrorCode::Param, "provide --pairs and/or --idproto");
  }
  std::vector<burst::ManifestEntry> manifest_entries = burst::load_manifest(opts.manifest);
  burst::validate_protocol(protocol, manifest_entries);

  std::map<std::string, burst::SetRepresentation> reps;
  {
    std::vector<burst::SetRepresentation> rep_list(sets.size());
    parallel_for_sets(sets.size(), [&](std::size_t i) {
      try {
        rep_list[i] = compute_representation(sets[i], method, opts.params, opts.quality_source,
                                             opts.power);
      } catch (const burst::Error& e) {
        throw burst::Error(e.code(), "set '" + sets[i].set_id + "': " + e.what());
      }
    });
    for (auto& rep : rep_list) reps.emplace(rep.set_id, std::move(rep));
  }
  fs::create_directories(opts.out);
  std::vector<burst::LabeledScore> scores = score_pairs(protocol.pairs, reps);
  json run_meta{{"manifest", opts.manifest},
                {"method", method},
                {"quality_source", opts.quality_source},
                {"power", opts.power},
                {"pairs", pairs_path},
                {"idproto", idproto_path},
                {"params", params_json(opts.params)}};
  write_metrics(opts.out, scores, protocol, reps, fars, ranks, fpirs, run_meta);
  write_run_config(opts.out, "pipeline", run_meta);
  std::cout << "pipeline method=" << method << " scored " << scores.size() << " pairs\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"burstiness detection and suppression for embedding feature sets"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string method = "mean";
  std::string strategy = "vanilla";
  std::string config_path;
  std::string pairs_path;
  std::string idproto_path;
  std::string reps_csv;
  std::uint64_t seed = 0;
  std::size_t top_k = 1;
  std::vector<double> fars = {1e-3, 1e-2, 1e-1};
  std::vector<std::size_t> ranks = {1, 5};
  std::vector<double> fpirs = {0.01, 0.1};

  auto add_params = [&](CLI::App* sub) {
    sub->add_option("--lambda", opts.params.lambda, "GMP ridge (> 0)");
    sub->add_option("--lambda1", opts.params.lambda1, "group-weight exponent (>= 0)");
    sub->add_option("--lambda2", opts.params.lambda2, "self-similarity exponent (>= 0)");
    sub->add_option("--lambda3", opts.params.lambda3, "GMP sampling scale");
    sub->add_option("--lambda4", opts.params.lambda4, "quality regularizer (>= 0)");
    sub->add_option("--n-t", opts.params.n_t, "instance size (>= 1)");
    sub->add_option("--k", opts.params.k, "kNN count (0 = max(2, ceil(sqrt(n))))");
    sub->add_option("--beta", opts.params.beta, "Quickshift++ fluctuation in [0,1)");
  };

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic benchmark");
  synth->add_option("--config", config_path, "key=value config file")->required();
  synth->add_option("--out", opts.out, "output directory")->required();

  CLI::App* detect = app.add_subcommand("detect", "write burst weights or partitions per set");
  detect->add_option("--manifest", opts.manifest)->required();
  detect->add_option("--out", opts.out)->required();
  detect->add_option("--method", method, "ssim|gmp|qagmp|qshift")
      ->required()
      ->check(CLI::IsMember({"ssim", "gmp", "qagmp", "qshift"}));
  detect->add_option("--quality-source", opts.quality_source,
                     "auto|manifest|norm_proxy|uniform");
  add_params(detect);

  CLI::App* sample = app.add_subcommand("sample", "draw burst-aware training instances");
  sample->add_option("--manifest", opts.manifest)->required();
  sample->add_option("--out", opts.out)->required();
  sample->add_option("--strategy", strategy, "vanilla|qshift|ssim|gmp")
      ->required()
      ->check(CLI::IsMember({"vanilla", "qshift", "ssim", "gmp"}));
  sample->add_option("--seed", seed, "RNG seed");
  add_params(sample);

  CLI::App* aggregate = app.add_subcommand("aggregate", "write one representation per set");
  aggregate->add_option("--manifest", opts.manifest)->required();
  aggregate->add_option("--out", opts.out)->required();
  aggregate->add_option("--method", method, "mean|attention|ssim|gmp|qagmp|two-stage|pnorm")
      ->required()
      ->check(CLI::IsMember({"mean", "attention", "ssim", "gmp", "qagmp", "two-stage", "pnorm"}));
  aggregate->add_option("--quality-source", opts.quality_source,
                        "auto|manifest|norm_proxy|uniform");
  aggregate->add_option("--p", opts.power, "power for pnorm, in (0,1]");
  add_params(aggregate);

  CLI::App* evaluate = app.add_subcommand("evaluate", "score a protocol over saved representations");
  evaluate->add_option("--manifest", opts.manifest)->required();
  evaluate->add_option("--reps", reps_csv, "reps.csv from the aggregate subcommand")->required();
  evaluate->add_option("--pairs", pairs_path, "verification pairs CSV");
  evaluate->add_option("--idproto", idproto_path, "identification protocol CSV");
  evaluate->add_option("--out", opts.out)->required();
  evaluate->add_option("--far", fars, "FAR operating points");
  evaluate->add_option("--ranks", ranks, "rank-N values");
  evaluate->add_option("--fpir", fpirs, "FPIR operating points");

  CLI::App* select = app.add_subcommand("select-bursty", "rank sets by burst degree");
  select->add_option("--manifest", opts.manifest)->required();
  select->add_option("--k", top_k, "how many sets to keep")->required();
  select->add_option("--out", opts.out)->required();

  CLI::App* pipeline = app.add_subcommand("pipeline", "aggregate + evaluate in one run");
  pipeline->add_option("--manifest", opts.manifest)->required();
  pipeline->add_option("--pairs", pairs_path, "verification pairs CSV");
  pipeline->add_option("--idproto", idproto_path, "identification protocol CSV");
  pipeline->add_option("--out", opts.out)->required();
  pipeline->add_option("--method", method, "mean|attention|ssim|gmp|qagmp|two-stage|pnorm")
      ->required()
      ->check(CLI::IsMember({"mean", "attention", "ssim", "gmp", "qagmp", "two-stage", "pnorm"}));
  pipeline->add_option("--quality-source", opts.quality_source,
                       "auto|manifest|norm_proxy|uniform");
  pipeline->add_option("--p", opts.power, "power for pnorm, in (0,1]");
  pipeline->add_option("--far", fars, "FAR operating points");
  pipeline->add_option("--ranks", ranks, "rank-N values");
  pipeline->add_option("--fpir", fpirs, "FPIR operating points");
  add_params(pipeline);

  try {
    app.parse(argc, argv);
    if (synth->parsed()) {
      cmd_synth(config_path, opts.out);
    } else if (detect->parsed()) {
      cmd_detect(opts, method);
    } else if (sample->parsed()) {
      cmd_sample(opts, strategy, seed);
    } else if (aggregate->parsed()) {
      cmd_aggregate(opts, method);
    } else if (evaluate->parsed()) {
      cmd_evaluate(opts.manifest, reps_csv, pairs_path, idproto_path, opts.out, fars, ranks,
                   fpirs);
    } else if (select->parsed()) {
      cmd_select_bursty(opts.manifest, top_k, opts.out);
    } else if (pipeline->parsed()) {
      cmd_pipeline(opts, method, pairs_path, idproto_path, fars, ranks, fpirs);
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const burst::Error& e) {
    std::cerr << "error (" << burst::to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
