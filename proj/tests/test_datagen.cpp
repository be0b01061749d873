#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "nodata/datagen.hpp"
#include "nodata/errors.hpp"
#include "nodata/rubric_io.hpp"

using namespace nodata;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("balanced generation hits the exact per-label quota with unique rows") {
  const Rubric ip = builtin_rubric("ip");
  DatasetSpec spec;
  spec.size = 498;
  spec.bit_length = 10;
  spec.balanced = true;
  spec.seed = 7;
  const LabelledDataset d = generate_dataset(ip, spec);

  REQUIRE(d.size() == 498);
  std::set<BitString> unique(d.xs.begin(), d.xs.end());
  CHECK(unique.size() == 498);
  int ones = 0;
  for (int y : d.labels) ones += y;
  CHECK(ones == 249);

  // Label faithfulness: every pair re-encodes to its stored label.
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(aggregate(spec.sigma, encode(ip, d.xs[i])) == d.labels[i]);
  }
}

TEST_CASE("minimal balanced set has one datapoint per label") {
  DatasetSpec spec;
  spec.size = 2;
  spec.bit_length = 10;
  spec.balanced = true;
  spec.seed = 3;
  const LabelledDataset d = generate_dataset(builtin_rubric("oop"), spec);
  CHECK(d.labels[0] + d.labels[1] == 1);
}

TEST_CASE("generation errors name the starved label") {
  // count_ones_gt(-1) is constantly true, so label 0 can never appear.
  const Rubric stuck("stuck", {Criterion::atomic("t", PredicateSpec::parse("count_ones_gt(-1)"))});
  DatasetSpec spec;
  spec.size = 10;
  spec.bit_length = 8;
  spec.balanced = true;
  spec.seed = 5;
  CHECK_THROWS_WITH_AS(generate_dataset(stuck, spec),
                       doctest::Contains("label 0 starved"), GenerationError);

  spec.balanced = false;
  spec.size = 1000;
  spec.bit_length = 3;  // only 8 unique strings exist
  CHECK_THROWS_AS(generate_dataset(stuck, spec), GenerationError);
}

TEST_CASE("odd balanced sizes are rejected up front") {
  DatasetSpec spec;
  spec.size = 499;
  spec.balanced = true;
  CHECK_THROWS_AS(generate_dataset(builtin_rubric("ip"), spec), ConfigError);
}

TEST_CASE("splits are stratified, disjoint, and deterministic") {
  const Rubric ip = builtin_rubric("ip");
  DatasetSpec spec;
  spec.size = 498;
  spec.bit_length = 10;
  spec.balanced = true;
  spec.seed = 7;
  const LabelledDataset d = generate_dataset(ip, spec);

  const auto [train, test] = split_dataset(d, 0.5, 99);
  CHECK(train.size() == 249);
  CHECK(test.size() == 249);

  int train_ones = 0, test_ones = 0;
  for (int y : train.labels) train_ones += y;
  for (int y : test.labels) test_ones += y;
  CHECK(std::abs(2 * train_ones - int(train.size())) <= 1);  // balanced up to one row
  CHECK(std::abs(2 * test_ones - int(test.size())) <= 1);

  std::set<BitString> train_set(train.xs.begin(), train.xs.end());
  for (const auto& x : test.xs) CHECK(train_set.count(x) == 0);

  const auto [train2, test2] = split_dataset(d, 0.5, 99);
  CHECK(train2.xs == train.xs);
  CHECK(test2.xs == test.xs);

  CHECK_THROWS_AS(split_dataset(d, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(split_dataset(d, 1.0, 1), ConfigError);
}

TEST_CASE("dataset files are byte-stable and round-trip") {
  const Rubric oop = builtin_rubric("oop");
  DatasetSpec spec;
  spec.size = 60;
  spec.bit_length = 10;
  spec.balanced = true;
  spec.seed = 12;
  const LabelledDataset d = generate_dataset(oop, spec);

  const auto a = temp_file("nodata_test_a.csv");
  const auto b = temp_file("nodata_test_b.csv");
  write_dataset(d, a);
  write_dataset(generate_dataset(oop, spec), b);
  CHECK(slurp(a) == slurp(b));

  const LabelledDataset back = read_dataset_csv(a);
  CHECK(back.xs == d.xs);
  CHECK(back.labels == d.labels);

  // The sidecar records the generating spec.
  const auto sidecar = nlohmann::json::parse(slurp(temp_file("nodata_test_a.spec.json")));
  CHECK(sidecar.at("rubric") == "oop");
  CHECK(sidecar.at("seed") == 12);
  CHECK(sidecar.at("balanced") == true);

  std::filesystem::remove(a);
  std::filesystem::remove(b);
  std::filesystem::remove(temp_file("nodata_test_a.spec.json"));
  std::filesystem::remove(temp_file("nodata_test_b.spec.json"));
}

TEST_CASE("malformed dataset files are rejected") {
  const auto p = temp_file("nodata_bad.csv");
  {
    std::ofstream out(p);
    out << "x,label\n01012,1\n";
  }
  CHECK_THROWS_AS(read_dataset_csv(p), FormatError);
  {
    std::ofstream out(p);
    out << "wrong,header\n";
  }
  CHECK_THROWS_AS(read_dataset_csv(p), FormatError);
  {
    std::ofstream out(p);
    out << "x,label\n0101,2\n";
  }
  CHECK_THROWS_AS(read_dataset_csv(p), FormatError);
  std::filesystem::remove(p);
}

TEST_CASE("phenomena separate once the space is large enough") {
  // At 16 bits the two balanced corpora barely touch; the overlap is
  // measured and reported, never forced.
  DatasetSpec spec;
  spec.size = 498;
  spec.bit_length = 16;
  spec.balanced = true;
  spec.seed = 7;
  const LabelledDataset ip = generate_dataset(builtin_rubric("ip"), spec);
  spec.seed = 8;
  const LabelledDataset oop = generate_dataset(builtin_rubric("oop"), spec);
  CHECK(dataset_overlap(ip, oop) < 0.05);
}
