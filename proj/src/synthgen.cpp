#include "burst/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <vector>

#include "burst/rng.hpp"
#include "burst/setio.hpp"

namespace burst {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::Config, message);
}

void validate_config(const SynthConfig& c) {
  require(c.identities >= 1, "identities must be >= 1");
  require(c.sets_per_identity >= 1, "sets_per_identity must be >= 1");
  require(c.d >= 1, "d must be >= 1");
  require(c.modes_per_identity >= 1, "modes_per_identity must be >= 1");
  require(c.elements_per_set >= 1, "elements_per_set must be >= 1");
  require(c.mode_cardinality_skew >= 1.0, "mode_cardinality_skew must be >= 1");
  require(c.skew_gradient >= 0.0, "skew_gradient must be >= 0");
  require(c.mode_spread >= 0.0, "mode_spread must be >= 0");
  require(c.intra_mode_noise > 0.0, "intra_mode_noise must be > 0");
  require(c.quality_noise_link >= 0.0, "quality_noise_link must be >= 0");
}

std::vector<double> unit_direction(std::mt19937_64& rng, std::size_t d) {
  std::vector<double> v(d);
  while (true) {
    gaussian_fill(rng, v.data(), d);
    double sumsq = 0.0;
    for (double x : v) sumsq += x * x;
    if (sumsq > 1e-12) {
      double inv = 1.0 / std::sqrt(sumsq);
      for (double& x : v) x *= inv;
      return v;
    }
  }
}

// Removes the components of v along each basis vector; returns false when
// the remainder is numerically zero.
bool orthogonalize(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
  for (const auto& b : basis) {
    double proj = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) proj += v[j] * b[j];
    for (std::size_t j = 0; j < v.size(); ++j) v[j] -= proj * b[j];
  }
  double sumsq = 0.0;
  for (double x : v) sumsq += x * x;
  if (sumsq < 1e-12) return false;
  double inv = 1.0 / std::sqrt(sumsq);
  for (double& x : v) x *= inv;
  return true;
}

std::size_t categorical(std::mt19937_64& rng, const std::vector<double>& weights, double total) {
  double u = unit_uniform(rng) * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    if (u < cum) return i;
  }
  return weights.size() - 1;
}

std::vector<std::size_t> permutation(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n; i-- > 1;) {
    auto j = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(i + 1));
    j = std::min(j, i);
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

}  // namespace

SynthConfig load_synth_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Resolution, "cannot open " + path.string());
  SynthConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    line = line.substr(start);
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::Config, path.string() + ":" + std::to_string(line_no) +
                                         ": expected key=value");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    try {
      if (key == "identities") {
        config.identities = std::stoul(value);
      } else if (key == "sets_per_identity") {
        config.sets_per_identity = std::stoul(value);
      } else if (key == "d") {
        config.d = std::stoul(value);
      } else if (key == "modes_per_identity") {
        config.modes_per_identity = std::stoul(value);
      } else if (key == "elements_per_set") {
        config.elements_per_set = std::stoul(value);
      } else if (key == "mode_cardinality_skew") {
        config.mode_cardinality_skew = std::stod(value);
      } else if (key == "skew_gradient") {
        config.skew_gradient = std::stod(value);
      } else if (key == "mode_spread") {
        config.mode_spread = std::stod(value);
      } else if (key == "intra_mode_noise") {
        config.intra_mode_noise = std::stod(value);
      } else if (key == "quality_noise_link") {
        config.quality_noise_link = std::stod(value);
      } else if (key == "seed") {
        config.seed = std::stoull(value);
      } else {
        throw Error(ErrorCode::Config, path.string() + ": unknown key '" + key + "'");
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(ErrorCode::Config,
                  path.string() + ": cannot parse value '" + value + "' for key '" + key + "'");
    }
  }
  validate_config(config);
  return config;
}

void save_synth_config(const std::filesystem::path& path, const SynthConfig& c) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Resolution, "cannot write " + path.string());
  out << "identities=" << c.identities << '\n'
      << "sets_per_identity=" << c.sets_per_identity << '\n'
      << "d=" << c.d << '\n'
      << "modes_per_identity=" << c.modes_per_identity << '\n'
      << "elements_per_set=" << c.elements_per_set << '\n'
      << "mode_cardinality_skew=" << format_double(c.mode_cardinality_skew) << '\n'
      << "skew_gradient=" << format_double(c.skew_gradient) << '\n'
      << "mode_spread=" << format_double(c.mode_spread) << '\n'
      << "intra_mode_noise=" << format_double(c.intra_mode_noise) << '\n'
      << "quality_noise_link=" << format_double(c.quality_noise_link) << '\n'
      << "seed=" << c.seed << '\n';
}

SynthOutput generate(const SynthConfig& config, const std::filesystem::path& out_dir) {
  validate_config(config);
  std::filesystem::create_directories(out_dir / "sets");
  std::mt19937_64 rng(config.seed);

  struct SetRecord {
    std::string set_id;
    std::string identity;
    std::string features_rel;
    std::string quality_rel;
    double redundancy = 0.0;
    std::vector<std::size_t> mode_labels;
  };
  std::vector<SetRecord> records;

  char buf[64];
  for (std::size_t ident = 0; ident < config.identities; ++ident) {
    std::snprintf(buf, sizeof(buf), "id%03zu", ident);
    std::string identity = buf;
    std::vector<double> mean = unit_direction(rng, config.d);

    std::vector<std::vector<double>> basis = {mean};
    std::vector<std::vector<double>> mode_dirs(config.modes_per_identity);
    for (std::size_t m = 0; m < config.modes_per_identity; ++m) {
      std::vector<double> offset(config.d);
      gaussian_fill(rng, offset.data(), config.d);
      if (basis.size() < config.d && orthogonalize(offset, basis)) {
        basis.push_back(offset);
      } else {
        double sumsq = 0.0;
        for (double x : offset) sumsq += x * x;
        double inv = sumsq > 1e-12 ? 1.0 / std::sqrt(sumsq) : 0.0;
        for (double& x : offset) x *= inv;
      }
      std::vector<double> dir(config.d);
      double sumsq = 0.0;
      for (std::size_t j = 0; j < config.d; ++j) {
        dir[j] = mean[j] + config.mode_spread * offset[j];
        sumsq += dir[j] * dir[j];
      }
      double inv = 1.0 / std::sqrt(sumsq);
      for (double& x : dir) x *= inv;
      mode_dirs[m] = std::move(dir);
    }

    double ramp = config.identities > 1
                      ? static_cast<double>(ident) / static_cast<double>(config.identities - 1)
                      : 0.0;
    double exponent = config.mode_cardinality_skew + config.skew_gradient * ramp;
    std::vector<double> zipf(config.modes_per_identity);
    double zipf_total = 0.0;
    for (std::size_t r = 0; r < zipf.size(); ++r) {
      zipf[r] = std::pow(static_cast<double>(r + 1), -exponent);
      zipf_total += zipf[r];
    }

    for (std::size_t s = 0; s < config.sets_per_identity; ++s) {
      std::snprintf(buf, sizeof(buf), "id%03zu_s%02zu", ident, s);
      SetRecord record;
      record.set_id = buf;
      record.identity = identity;
      record.features_rel = "sets/" + record.set_id + ".bset";
      record.quality_rel = "sets/" + record.set_id + ".quality.txt";

      std::vector<std::size_t> perm = permutation(rng, config.modes_per_identity);
      const std::size_t n = config.elements_per_set;
      FeatureSet set;
      set.features = Matrix(n, config.d);
      std::vector<double> quality(n);
      record.mode_labels.resize(n);
      std::vector<std::size_t> mode_counts(config.modes_per_identity, 0);
      std::vector<double> noise(config.d);
      for (std::size_t e = 0; e < n; ++e) {
        std::size_t rank = categorical(rng, zipf, zipf_total);
        std::size_t mode = perm[rank];
        record.mode_labels[e] = mode;
        ++mode_counts[mode];
        double mult = 1.0 + config.quality_noise_link * unit_uniform(rng);
        double sigma = config.intra_mode_noise * mult;
        double* row = set.features.row(e);
        while (true) {
          gaussian_fill(rng, noise.data(), config.d);
          double sumsq = 0.0;
          for (std::size_t j = 0; j < config.d; ++j) {
            row[j] = mode_dirs[mode][j] + sigma * noise[j];
            sumsq += row[j] * row[j];
          }
          if (sumsq > 1e-12) {
            // pre-normalization norm encodes quality
            double scale = (1.0 / mult) / std::sqrt(sumsq);
            for (std::size_t j = 0; j < config.d; ++j) row[j] *= scale;
            break;
          }
        }
        quality[e] = 1.0 / mult;
      }
      double redundancy = 0.0;
      for (std::size_t c : mode_counts) {
        double p = static_cast<double>(c) / static_cast<double>(n);
        redundancy += p * p;
      }
      record.redundancy = redundancy;

      save_feature_set(out_dir / record.features_rel, set);
      save_quality(out_dir / record.quality_rel, quality);
      records.push_back(std::move(record));
    }
  }

  SynthOutput output;
  output.manifest = out_dir / "manifest.csv";
  {
    std::ofstream out(output.manifest, std::ios::trunc);
    out << "set_id,identity,features,quality\n";
    for (const SetRecord& r : records) {
      out << r.set_id << ',' << r.identity << ',' << r.features_rel << ',' << r.quality_rel
          << '\n';
    }
  }

  output.truth_sets = out_dir / "truth_sets.csv";
  {
    std::ofstream out(output.truth_sets, std::ios::trunc);
    out << "set_id,identity,redundancy\n";
    for (const SetRecord& r : records) {
      out << r.set_id << ',' << r.identity << ',' << format_double(r.redundancy) << '\n';
    }
  }
  output.truth_elements = out_dir / "truth_elements.csv";
  {
    std::ofstream out(output.truth_elements, std::ios::trunc);
    out << "set_id,index,mode\n";
    for (const SetRecord& r : records) {
      for (std::size_t e = 0; e < r.mode_labels.size(); ++e) {
        out << r.set_id << ',' << e << ',' << r.mode_labels[e] << '\n';
      }
    }
  }

  if (config.identities >= 2 && config.sets_per_identity >= 2) {
    std::vector<VerificationPair> pairs;
    for (std::size_t i = 0; i < records.size(); ++i) {
      for (std::size_t j = i + 1; j < records.size(); ++j) {
        pairs.push_back({records[i].set_id, records[j].set_id,
                         records[i].identity == records[j].identity});
      }
    }
    output.pairs = out_dir / "pairs.csv";
    save_pairs(output.pairs, pairs);
  }

  // open-set identification: the trailing fifth of the identities stay out
  // of the gallery and act as impostor probes
  std::size_t impostor_identities = config.identities / 5;
  std::size_t galleried = config.identities - impostor_identities;
  std::vector<IdentificationEntry> entries;
  for (const SetRecord& r : records) {
    std::size_t ident = 0;
    std::sscanf(r.set_id.c_str(), "id%zu", &ident);
    bool gallery = ident < galleried && r.set_id.ends_with("_s00");
    entries.push_back({r.set_id, gallery, r.identity});
  }
  bool has_gallery = false, has_probe = false;
  for (const IdentificationEntry& e : entries) {
    (e.in_gallery ? has_gallery : has_probe) = true;
  }
  if (has_gallery && has_probe) {
    output.identification = out_dir / "identification.csv";
    save_identification(output.identification, entries);
  }

  output.config_echo = out_dir / "config.txt";
  save_synth_config(output.config_echo, config);
  return output;
}

}  // namespace burst
