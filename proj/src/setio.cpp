#include "burst/setio.hpp"

#include <array>
#include <bit>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "burst/kernels.hpp"

namespace burst {

namespace {

constexpr std::array<char, 4> kMagic = {'B', 'S', 'E', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff),
                           static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), b.size());
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float f32_from_bytes(const unsigned char* p) { return std::bit_cast<float>(get_u32(p)); }

void put_f32(std::ostream& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& token, const std::filesystem::path& path) {
  const char* begin = token.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw Error(ErrorCode::Format,
                path.string() + ": cannot parse number '" + token + "'");
  }
  return v;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

std::ifstream open_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Resolution, "cannot open " + path.string());
  return in;
}

void require_finite(const Matrix& m, const std::filesystem::path& path) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j))) {
        throw Error(ErrorCode::Data, path.string() + ": non-finite value at row " +
                                         std::to_string(i) + " col " + std::to_string(j));
      }
    }
  }
}

FeatureSet load_feature_csv(const std::filesystem::path& path) {
  std::ifstream in = open_text(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& f : fields) {
      // quantize through f32 so CSV and binary fixtures load identical bits
      row.push_back(static_cast<double>(static_cast<float>(parse_double(f, path))));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::Integrity,
                  path.string() + ": row " + std::to_string(rows.size()) + " has " +
                      std::to_string(row.size()) + " columns, expected " +
                      std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::Format, path.string() + ": empty feature file");
  FeatureSet set;
  set.features = Matrix(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) set.features(i, j) = rows[i][j];
  }
  require_finite(set.features, path);
  return set;
}

}  // namespace

FeatureSet load_feature_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Resolution, "cannot open " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() == static_cast<std::streamsize>(magic.size()) && magic == kMagic) {
    std::array<unsigned char, 12> header{};
    in.read(reinterpret_cast<char*>(header.data()), header.size());
    if (in.gcount() != static_cast<std::streamsize>(header.size())) {
      throw Error(ErrorCode::Format, path.string() + ": truncated header");
    }
    std::uint32_t version = get_u32(header.data());
    std::uint32_t n = get_u32(header.data() + 4);
    std::uint32_t d = get_u32(header.data() + 8);
    if (version != kVersion) {
      throw Error(ErrorCode::Format,
                  path.string() + ": unsupported version " + std::to_string(version));
    }
    if (n == 0 || d == 0) {
      throw Error(ErrorCode::Format, path.string() + ": declared empty shape " +
                                         std::to_string(n) + "x" + std::to_string(d));
    }
    std::vector<unsigned char> payload(static_cast<std::size_t>(n) * d * 4);
    in.read(reinterpret_cast<char*>(payload.data()), payload.size());
    if (in.gcount() != static_cast<std::streamsize>(payload.size())) {
      throw Error(ErrorCode::Integrity,
                  path.string() + ": payload shorter than declared " + std::to_string(n) +
                      "x" + std::to_string(d));
    }
    char extra;
    if (in.read(&extra, 1)) {
      throw Error(ErrorCode::Integrity,
                  path.string() + ": payload longer than declared " + std::to_string(n) +
                      "x" + std::to_string(d));
    }
    FeatureSet set;
    set.features = Matrix(n, d);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n) * d; ++i) {
      set.features.data()[i] = static_cast<double>(f32_from_bytes(payload.data() + i * 4));
    }
    require_finite(set.features, path);
    return set;
  }
  in.close();
  return load_feature_csv(path);
}

void save_feature_set(const std::filesystem::path& path, const FeatureSet& set) {
  if (set.size() == 0 || set.dim() == 0) {
    throw Error(ErrorCode::Contract, "refusing to write empty set to " + path.string());
  }
  require_finite(set.features, path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Resolution, "cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(set.size()));
  put_u32(out, static_cast<std::uint32_t>(set.dim()));
  for (double v : set.features.data()) put_f32(out, static_cast<float>(v));
  if (!out) throw Error(ErrorCode::Resolution, "write failed for " + path.string());
}

FeatureSet normalize(const FeatureSet& set) {
  FeatureSet result = set;
  std::vector<double> norms = kernels::row_norms(set.features);
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (norms[i] < std::numeric_limits<double>::min()) {
      throw Error(ErrorCode::Degenerate,
                  "cannot normalize zero row " + std::to_string(i) +
                      (set.set_id.empty() ? "" : " of set " + set.set_id));
    }
    double inv = 1.0 / norms[i];
    double* row = result.features.row(i);
    for (std::size_t j = 0; j < result.dim(); ++j) row[j] *= inv;
  }
  if (result.raw_norms.empty()) result.raw_norms = std::move(norms);
  return result;
}

std::vector<double> load_quality(const std::filesystem::path& path, std::size_t n) {
  std::ifstream in = open_text(path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    values.push_back(parse_double(line, path));
  }
  if (values.size() != n) {
    throw Error(ErrorCode::Integrity, path.string() + ": " + std::to_string(values.size()) +
                                          " quality values for " + std::to_string(n) +
                                          " elements");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] <= 0.0 || values[i] > 1.0) {
      throw Error(ErrorCode::Data,
                  path.string() + ": quality outside (0,1] at line " + std::to_string(i));
    }
  }
  return values;
}

void save_quality(const std::filesystem::path& path, const std::vector<double>& quality) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Resolution, "cannot write " + path.string());
  for (double v : quality) out << format_double(v) << '\n';
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in = open_text(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "set_id,identity,features,quality") {
    throw Error(ErrorCode::Format,
                path.string() + ": expected header 'set_id,identity,features,quality'");
  }
  const std::filesystem::path base = path.parent_path();
  std::vector<ManifestEntry> entries;
  std::set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 4) {
      throw Error(ErrorCode::Format, path.string() + ":" + std::to_string(line_no) +
                                         ": expected 4 fields, got " +
                                         std::to_string(fields.size()));
    }
    ManifestEntry entry;
    entry.set_id = fields[0];
    entry.identity = fields[1];
    if (entry.set_id.empty() || entry.identity.empty() || fields[2].empty()) {
      throw Error(ErrorCode::Manifest,
                  path.string() + ":" + std::to_string(line_no) + ": empty required field");
    }
    if (!seen.insert(entry.set_id).second) {
      throw Error(ErrorCode::Manifest,
                  path.string() + ": duplicate set_id '" + entry.set_id + "'");
    }
    entry.features = base / fields[2];
    if (!std::filesystem::exists(entry.features)) {
      throw Error(ErrorCode::Resolution, path.string() + ": feature file '" +
                                             entry.features.string() + "' does not exist");
    }
    if (!fields[3].empty()) {
      entry.quality = base / fields[3];
      if (!std::filesystem::exists(entry.quality)) {
        throw Error(ErrorCode::Resolution, path.string() + ": quality file '" +
                                               entry.quality.string() + "' does not exist");
      }
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

FeatureSet load_set(const ManifestEntry& entry) {
  FeatureSet set = load_feature_set(entry.features);
  set.set_id = entry.set_id;
  set.identity = entry.identity;
  if (!entry.quality.empty()) set.quality = load_quality(entry.quality, set.size());
  return set;
}

WeightVector load_weights(const std::filesystem::path& path) {
  std::ifstream in = open_text(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Format, path.string() + ": empty file");
  line = strip_cr(line);
  const std::string prefix = "# kind=";
  if (!line.starts_with(prefix)) {
    throw Error(ErrorCode::Format, path.string() + ": expected '# kind=' header");
  }
  WeightVector w;
  w.kind = weight_kind_from_string(line.substr(prefix.size()));
  if (!std::getline(in, line) || strip_cr(line) != "index,value") {
    throw Error(ErrorCode::Format, path.string() + ": expected 'index,value' header");
  }
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 2) {
      throw Error(ErrorCode::Format, path.string() + ": expected 2 fields per row");
    }
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), index);
    if (ec != std::errc() || ptr != fields[0].data() + fields[0].size() ||
        index != w.values.size()) {
      throw Error(ErrorCode::Integrity,
                  path.string() + ": non-sequential index '" + fields[0] + "'");
    }
    w.values.push_back(parse_double(fields[1], path));
  }
  if (w.values.empty()) throw Error(ErrorCode::Format, path.string() + ": no weight rows");
  return w;
}

void save_weights(const std::filesystem::path& path, const WeightVector& w) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Resolution, "cannot write " + path.string());
  out << "# kind=" << to_string(w.kind) << "\nindex,value\n";
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    out << i << ',' << format_double(w.values[i]) << '\n';
  }
}

std::vector<VerificationPair> load_pairs(const std::filesystem::path& path) {
  std::ifstream in = open_text(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "a,b,label") {
    throw Error(ErrorCode::Format, path.string() + ": expected header 'a,b,label'");
  }
  std::vector<VerificationPair> pairs;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 3) {
      throw Error(ErrorCode::Format, path.string() + ": expected 3 fields per row");
    }
    VerificationPair pair;
    pair.a = fields[0];
    pair.b = fields[1];
    if (fields[2] == "same") {
      pair.same = true;
    } else if (fields[2] == "different") {
      pair.same = false;
    } else {
      throw Error(ErrorCode::Format, path.string() + ": label '" + fields[2] +
                                         "' is neither 'same' nor 'different'");
    }
    if (pair.a == pair.b) {
      throw Error(ErrorCode::Protocol, path.string() + ": self-pair '" + pair.a + "'");
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void save_pairs(const std::filesystem::path& path, const std::vector<VerificationPair>& pairs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Resolution, "cannot write " + path.string());
  out << "a,b,label\n";
  for (const VerificationPair& p : pairs) {
    out << p.a << ',' << p.b << ',' << (p.same ? "same" : "different") << '\n';
  }
}

std::vector<IdentificationEntry> load_identification(const std::filesystem::path& path) {
  std::ifstream in = open_text(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "probe,gallery_flag,identity") {
    throw Error(ErrorCode::Format,
                path.string() + ": expected header 'probe,gallery_flag,identity'");
  }
  std::vector<IdentificationEntry> entries;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 3) {
      throw Error(ErrorCode::Format, path.string() + ": expected 3 fields per row");
    }
    IdentificationEntry entry;
    entry.set_id = fields[0];
    if (fields[1] == "1") {
      entry.in_gallery = true;
    } else if (fields[1] == "0") {
      entry.in_gallery = false;
    } else {
      throw Error(ErrorCode::Format,
                  path.string() + ": gallery_flag '" + fields[1] + "' is not 0/1");
    }
    entry.identity = fields[2];
    entries.push_back(std::move(entry));
  }
  return entries;
}

void save_identification(const std::filesystem::path& path,
                         const std::vector<IdentificationEntry>& entries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Resolution, "cannot write " + path.string());
  out << "probe,gallery_flag,identity\n";
  for (const IdentificationEntry& e : entries) {
    out << e.set_id << ',' << (e.in_gallery ? 1 : 0) << ',' << e.identity << '\n';
  }
}

void save_partition(const std::filesystem::path& path,
                    const std::vector<std::uint32_t>& assignments) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Resolution, "cannot write " + path.string());
  out << "index,group\n";
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    out << i << ',' << assignments[i] << '\n';
  }
}

void validate_protocol(const EvalProtocol& protocol, const std::vector<ManifestEntry>& manifest) {
  std::set<std::string> ids;
  for (const ManifestEntry& e : manifest) ids.insert(e.set_id);
  auto require = [&](const std::string& id) {
    if (!ids.contains(id)) {
      throw Error(ErrorCode::Resolution,
                  "protocol references unknown set_id '" + id + "'");
    }
  };
  for (const VerificationPair& p : protocol.pairs) {
    require(p.a);
    require(p.b);
    if (p.a == p.b) throw Error(ErrorCode::Protocol, "self-pair '" + p.a + "'");
  }
  for (const IdentificationEntry& e : protocol.entries) require(e.set_id);
}

}  // namespace burst
