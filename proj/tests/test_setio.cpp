#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include <doctest.h>

#include "burst/kernels.hpp"
#include "burst/setio.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using burst::Error;
using burst::ErrorCode;
using burst::FeatureSet;
using burst::Matrix;

namespace {

FeatureSet random_f32_set(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FeatureSet set;
  set.features = Matrix(n, d);
  for (double& v : set.features.data()) {
    v = static_cast<double>(static_cast<float>(burst::unit_uniform(rng) * 2.0 - 1.0));
  }
  return set;
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string header_bytes(std::uint32_t n, std::uint32_t d) {
  std::string bytes = "BSET";
  auto push_u32 = [&](std::uint32_t v) {
    bytes.push_back(static_cast<char>(v & 0xff));
    bytes.push_back(static_cast<char>((v >> 8) & 0xff));
    bytes.push_back(static_cast<char>((v >> 16) & 0xff));
    bytes.push_back(static_cast<char>((v >> 24) & 0xff));
  };
  push_u32(1);
  push_u32(n);
  push_u32(d);
  return bytes;
}

std::string f32_bytes(float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  std::string bytes;
  bytes.push_back(static_cast<char>(bits & 0xff));
  bytes.push_back(static_cast<char>((bits >> 8) & 0xff));
  bytes.push_back(static_cast<char>((bits >> 16) & 0xff));
  bytes.push_back(static_cast<char>((bits >> 24) & 0xff));
  return bytes;
}

}  // namespace

TEST_CASE("binary load reads a well-formed 2x3 file") {
  TempDir tmp;
  std::string bytes = header_bytes(2, 3);
  for (float v : {1.0f, 2.0f, 3.0f, 4.0f, 5.0f, 6.0f}) bytes += f32_bytes(v);
  write_bytes(tmp.path / "a.bset", bytes);
  FeatureSet set = burst::load_feature_set(tmp.path / "a.bset");
  CHECK(set.size() == 2);
  CHECK(set.dim() == 3);
  CHECK(set.features(0, 0) == 1.0);
  CHECK(set.features(1, 2) == 6.0);
}

TEST_CASE("payload longer or shorter than the declared shape is an integrity error") {
  TempDir tmp;
  std::string bytes = header_bytes(2, 3);
  for (int i = 0; i < 9; ++i) bytes += f32_bytes(static_cast<float>(i));  // 3 rows
  write_bytes(tmp.path / "long.bset", bytes);
  CHECK_THROWS_WITH_AS(burst::load_feature_set(tmp.path / "long.bset"),
                       doctest::Contains("longer than declared"), Error);

  std::string short_bytes = header_bytes(2, 3);
  for (int i = 0; i < 5; ++i) short_bytes += f32_bytes(static_cast<float>(i));
  write_bytes(tmp.path / "short.bset", short_bytes);
  try {
    burst::load_feature_set(tmp.path / "short.bset");
    FAIL("expected integrity error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Integrity);
  }
}

TEST_CASE("malformed headers are format errors") {
  TempDir tmp;
  write_bytes(tmp.path / "trunc.bset", "BSET\x01");
  try {
    burst::load_feature_set(tmp.path / "trunc.bset");
    FAIL("expected format error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Format);
  }
  std::string zero = header_bytes(0, 3);
  write_bytes(tmp.path / "zero.bset", zero);
  try {
    burst::load_feature_set(tmp.path / "zero.bset");
    FAIL("expected format error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Format);
  }
}

TEST_CASE("NaN payload is a data error") {
  TempDir tmp;
  std::string bytes = header_bytes(1, 2);
  bytes += f32_bytes(1.0f);
  bytes += f32_bytes(std::nanf(""));
  write_bytes(tmp.path / "nan.bset", bytes);
  try {
    burst::load_feature_set(tmp.path / "nan.bset");
    FAIL("expected data error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Data);
  }
}

TEST_CASE("binary round trip is bit exact") {
  TempDir tmp;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 shape_rng(seed * 7 + 1);
    std::size_t n = 1 + shape_rng() % 12;
    std::size_t d = 1 + shape_rng() % 24;
    FeatureSet original = random_f32_set(n, d, seed);
    burst::save_feature_set(tmp.path / "rt.bset", original);
    FeatureSet loaded = burst::load_feature_set(tmp.path / "rt.bset");
    REQUIRE(loaded.size() == n);
    REQUIRE(loaded.dim() == d);
    CHECK(std::memcmp(loaded.features.data().data(), original.features.data().data(),
                      n * d * sizeof(double)) == 0);
  }
}

TEST_CASE("CSV features parse with f32 quantization and reject ragged rows") {
  TempDir tmp;
  {
    std::ofstream out(tmp.path / "f.csv");
    out << "0.1,0.2,0.30000000000001\n-1,2,3\n";
  }
  FeatureSet set = burst::load_feature_set(tmp.path / "f.csv");
  CHECK(set.size() == 2);
  CHECK(set.dim() == 3);
  CHECK(set.features(0, 0) == static_cast<double>(0.1f));
  {
    std::ofstream out(tmp.path / "ragged.csv");
    out << "1,2,3\n4,5\n";
  }
  try {
    burst::load_feature_set(tmp.path / "ragged.csv");
    FAIL("expected integrity error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Integrity);
  }
}

TEST_CASE("normalize scales rows to unit norm and keeps raw norms") {
  FeatureSet set;
  set.features = Matrix(1, 2);
  set.features(0, 0) = 3.0;
  set.features(0, 1) = 4.0;
  FeatureSet unit = burst::normalize(set);
  CHECK(unit.features(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(unit.features(0, 1) == doctest::Approx(0.8).epsilon(1e-15));
  REQUIRE(unit.raw_norms.size() == 1);
  CHECK(unit.raw_norms[0] == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("normalize is idempotent within 1e-12 and preserves the side channel") {
  FeatureSet set = random_f32_set(5, 8, 31);
  FeatureSet once = burst::normalize(set);
  FeatureSet twice = burst::normalize(once);
  for (std::size_t i = 0; i < once.features.data().size(); ++i) {
    CHECK(std::abs(once.features.data()[i] - twice.features.data()[i]) <= 1e-12);
  }
  CHECK(twice.raw_norms == once.raw_norms);
  auto norms = burst::kernels::row_norms(once.features);
  for (double n : norms) CHECK(std::abs(n - 1.0) <= 1e-9);
}

TEST_CASE("normalize rejects a zero row naming its index") {
  FeatureSet set;
  set.features = Matrix(3, 2);
  set.features(0, 0) = 1.0;
  set.features(2, 1) = 1.0;  // row 1 stays zero
  CHECK_THROWS_WITH_AS(burst::normalize(set), doctest::Contains("row 1"), Error);
}

TEST_CASE("manifest loads entries and rejects duplicates and missing files") {
  TempDir tmp;
  FeatureSet set = random_f32_set(2, 3, 5);
  burst::save_feature_set(tmp.path / "a.bset", set);
  burst::save_feature_set(tmp.path / "b.bset", set);
  {
    std::ofstream out(tmp.path / "manifest.csv");
    out << "set_id,identity,features,quality\ns1,idA,a.bset,\ns2,idA,b.bset,\n";
  }
  auto entries = burst::load_manifest(tmp.path / "manifest.csv");
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].set_id == "s1");
  CHECK(entries[1].features.filename() == "b.bset");

  {
    std::ofstream out(tmp.path / "dup.csv");
    out << "set_id,identity,features,quality\ns1,idA,a.bset,\ns1,idB,b.bset,\n";
  }
  try {
    burst::load_manifest(tmp.path / "dup.csv");
    FAIL("expected manifest error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Manifest);
  }

  {
    std::ofstream out(tmp.path / "missing.csv");
    out << "set_id,identity,features,quality\ns1,idA,nope.bset,\n";
  }
  try {
    burst::load_manifest(tmp.path / "missing.csv");
    FAIL("expected resolution error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Resolution);
  }
}

TEST_CASE("quality sidecar validates length and range") {
  TempDir tmp;
  {
    std::ofstream out(tmp.path / "q.txt");
    out << "0.5\n1\n";
  }
  auto q = burst::load_quality(tmp.path / "q.txt", 2);
  CHECK(q == std::vector<double>{0.5, 1.0});
  try {
    burst::load_quality(tmp.path / "q.txt", 3);
    FAIL("expected integrity error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Integrity);
  }
  {
    std::ofstream out(tmp.path / "bad.txt");
    out << "0.5\n1.5\n";
  }
  try {
    burst::load_quality(tmp.path / "bad.txt", 2);
    FAIL("expected data error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Data);
  }
}

TEST_CASE("weight vectors round trip exactly through CSV") {
  TempDir tmp;
  std::mt19937_64 rng(9);
  burst::WeightVector w;
  w.kind = burst::WeightKind::gmp;
  for (int i = 0; i < 17; ++i) w.values.push_back(burst::unit_uniform(rng) * 20.0 - 10.0);
  burst::save_weights(tmp.path / "w.csv", w);
  burst::WeightVector back = burst::load_weights(tmp.path / "w.csv");
  CHECK(back.kind == burst::WeightKind::gmp);
  REQUIRE(back.values.size() == w.values.size());
  CHECK(std::memcmp(back.values.data(), w.values.data(), w.values.size() * sizeof(double)) == 0);
}

TEST_CASE("protocol files round trip and reject bad labels and self-pairs") {
  TempDir tmp;
  std::vector<burst::VerificationPair> pairs = {{"a", "b", true}, {"a", "c", false}};
  burst::save_pairs(tmp.path / "p.csv", pairs);
  auto back = burst::load_pairs(tmp.path / "p.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].same);
  CHECK_FALSE(back[1].same);

  {
    std::ofstream out(tmp.path / "bad.csv");
    out << "a,b,label\nx,y,maybe\n";
  }
  try {
    burst::load_pairs(tmp.path / "bad.csv");
    FAIL("expected format error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Format);
  }
  {
    std::ofstream out(tmp.path / "self.csv");
    out << "a,b,label\nx,x,same\n";
  }
  try {
    burst::load_pairs(tmp.path / "self.csv");
    FAIL("expected protocol error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Protocol);
  }

  std::vector<burst::IdentificationEntry> entries = {{"g1", true, "idA"}, {"p1", false, "idA"}};
  burst::save_identification(tmp.path / "id.csv", entries);
  auto id_back = burst::load_identification(tmp.path / "id.csv");
  REQUIRE(id_back.size() == 2);
  CHECK(id_back[0].in_gallery);
  CHECK(id_back[1].identity == "idA");
}

TEST_CASE("validate_protocol resolves ids against the manifest") {
  TempDir tmp;
  FeatureSet set = random_f32_set(2, 3, 5);
  burst::save_feature_set(tmp.path / "a.bset", set);
  {
    std::ofstream out(tmp.path / "manifest.csv");
    out << "set_id,identity,features,quality\ns1,idA,a.bset,\n";
  }
  auto entries = burst::load_manifest(tmp.path / "manifest.csv");
  burst::EvalProtocol protocol;
  protocol.pairs = {{"s1", "ghost", false}};
  try {
    burst::validate_protocol(protocol, entries);
    FAIL("expected resolution error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Resolution);
  }
}
