#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "burst/types.hpp"

namespace burst {

// On-disk feature format: magic "BSET", u32 version=1, u32 n, u32 d, then
// n*d little-endian 32-bit floats row-major. A CSV alternative (one row per
// element, d comma-separated columns) is accepted for hand-authored
// fixtures; CSV values are parsed as 64-bit then quantized through 32-bit
// so both routes load identical bits.

struct ManifestEntry {
  std::string set_id;
  std::string identity;
  std::filesystem::path features;  // resolved against the manifest directory
  std::filesystem::path quality;   // empty when absent
};

// Loads a feature file (binary or CSV, detected by the magic). Values are
// read verbatim; no normalization is applied.
FeatureSet load_feature_set(const std::filesystem::path& path);

// Writes the binary format. Features are stored as 32-bit floats.
void save_feature_set(const std::filesystem::path& path, const FeatureSet& set);

// Returns a copy with every row scaled to unit Euclidean norm. Original row
// norms are kept in raw_norms (already-present raw_norms are preserved, so
// the operation is idempotent including the side channel).
FeatureSet normalize(const FeatureSet& set);

// Quality sidecar: one value per line, exactly n lines, entries in (0,1].
std::vector<double> load_quality(const std::filesystem::path& path, std::size_t n);
void save_quality(const std::filesystem::path& path, const std::vector<double>& quality);

// Manifest: UTF-8 CSV with header `set_id,identity,features,quality`.
// Relative file paths resolve against the manifest directory. Duplicate
// set_ids and unresolvable files are rejected.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

// Loads features + optional quality sidecar for one manifest entry.
FeatureSet load_set(const ManifestEntry& entry);

// Weight vectors as CSV `index,value` with a `# kind=<kind>` header line.
WeightVector load_weights(const std::filesystem::path& path);
void save_weights(const std::filesystem::path& path, const WeightVector& w);

// Verification pairs: CSV with header `a,b,label`, label in {same,different}.
std::vector<VerificationPair> load_pairs(const std::filesystem::path& path);
void save_pairs(const std::filesystem::path& path, const std::vector<VerificationPair>& pairs);

// Identification lists: CSV with header `probe,gallery_flag,identity`.
std::vector<IdentificationEntry> load_identification(const std::filesystem::path& path);
void save_identification(const std::filesystem::path& path,
                         const std::vector<IdentificationEntry>& entries);

// Group partitions as CSV `index,group`.
void save_partition(const std::filesystem::path& path, const std::vector<std::uint32_t>& assignments);

// Checks that every set_id referenced by the protocol resolves in the
// manifest and that no verification pair is a self-pair.
void validate_protocol(const EvalProtocol& protocol, const std::vector<ManifestEntry>& manifest);

}  // namespace burst
