#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nodata/rubric.hpp"

namespace nodata {

struct DatasetSpec {
  std::string rubric_id;
  AggregatorSpec sigma;
  std::size_t size = 498;
  std::size_t bit_length = 10;
  bool balanced = true;
  std::uint64_t seed = 0;
};

struct LabelledDataset {
  std::vector<BitString> xs;
  std::vector<int> labels;  // always aggregate(sigma, encode(rubric, x))
  DatasetSpec spec;

  std::size_t size() const { return xs.size(); }
};

/// Rejection-samples unique uniform n-bit strings labelled by sigma(C(x)).
/// Balanced specs keep exactly size/2 per label; a starved label raises a
/// GenerationError naming it.
LabelledDataset generate_dataset(const Rubric& rubric, const DatasetSpec& spec);

/// Label-stratified split into (train, test); disjoint, deterministic.
std::pair<LabelledDataset, LabelledDataset> split_dataset(const LabelledDataset& dataset,
                                                          double train_fraction,
                                                          std::uint64_t seed);

/// Fraction of this dataset's strings that also appear in the other.
double dataset_overlap(const LabelledDataset& a, const LabelledDataset& b);

/// CSV with header "x,label" plus a spec/seed sidecar next to it
/// (<stem>.spec.json).
void write_dataset(const LabelledDataset& dataset, const std::filesystem::path& csv_path);

LabelledDataset read_dataset_csv(const std::filesystem::path& csv_path);

nlohmann::ordered_json spec_to_json(const DatasetSpec& spec);

}  // namespace nodata
