#include "nodata/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "nodata/errors.hpp"
#include "nodata/rng.hpp"

namespace nodata {

LabelledDataset generate_dataset(const Rubric& rubric, const DatasetSpec& spec) {
  if (spec.size < 2) throw ConfigError("dataset size must be >= 2");
  if (spec.bit_length < 1) throw ConfigError("bit length must be >= 1");
  if (spec.balanced && spec.size % 2 != 0) {
    throw ConfigError("balanced datasets need an even size");
  }
  if (!spec.rubric_id.empty() && spec.rubric_id != rubric.id()) {
    throw ConfigError("dataset spec names rubric \"" + spec.rubric_id +
                      "\" but was given \"" + rubric.id() + "\"");
  }

  Rng rng(Rng::mix(spec.seed, 0xDA7A5E7ULL));
  const std::size_t budget = std::max<std::size_t>(100000, 256 * spec.size);
  const std::size_t per_label = spec.size / 2;

  LabelledDataset out;
  out.spec = spec;
  out.spec.rubric_id = rubric.id();
  std::unordered_set<BitString> seen;
  std::size_t count[2] = {0, 0};

  for (std::size_t attempt = 0; attempt < budget && out.size() < spec.size; ++attempt) {
    BitString x = BitString::random(rng, spec.bit_length);
    if (!seen.insert(x).second) continue;
    const int y = aggregate(spec.sigma, encode(rubric, x));
    if (spec.balanced && count[y] >= per_label) continue;
    ++count[y];
    out.xs.push_back(std::move(x));
    out.labels.push_back(y);
  }

  if (out.size() < spec.size) {
    const int starved = spec.balanced ? (count[0] < per_label ? 0 : 1) : -1;
    throw GenerationError(
        "dataset generation exhausted its sampling budget" +
        (starved >= 0 ? " (label " + std::to_string(starved) + " starved; the bit length may be "
                        "too short to realize it often enough)"
                      : std::string(" (bit length too short for that many unique strings)")));
  }
  return out;
}

std::pair<LabelledDataset, LabelledDataset> split_dataset(const LabelledDataset& dataset,
                                                          double train_fraction,
                                                          std::uint64_t seed) {
  if (train_fraction <= 0.0 || train_fraction >= 1.0) {
    throw ConfigError("train fraction must be strictly between 0 and 1");
  }
  const std::size_t total_train =
      static_cast<std::size_t>(std::llround(train_fraction * dataset.size()));
  if (total_train == 0 || total_train == dataset.size()) {
    throw ConfigError("train fraction leaves one side of the split empty");
  }

  std::vector<std::size_t> by_label[2];
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_label[dataset.labels[i]].push_back(i);
  }

  Rng rng(Rng::mix(seed, 0x5B171ULL));
  for (auto& group : by_label) {
    for (std::size_t i = group.size(); i > 1; --i) {
      std::swap(group[i - 1], group[rng.below(i)]);
    }
  }

  // Per-label floor first, then hand the remainder out label by label so the
  // totals land exactly on total_train.
  std::size_t take[2];
  take[0] = static_cast<std::size_t>(train_fraction * by_label[0].size());
  take[1] = static_cast<std::size_t>(train_fraction * by_label[1].size());
  for (int l = 0; l < 2 && take[0] + take[1] < total_train; ++l) {
    while (take[l] < by_label[l].size() && take[0] + take[1] < total_train) ++take[l];
  }

  std::vector<bool> in_train(dataset.size(), false);
  for (int l = 0; l < 2; ++l) {
    for (std::size_t i = 0; i < take[l]; ++i) in_train[by_label[l][i]] = true;
  }

  LabelledDataset train, test;
  train.spec = dataset.spec;
  test.spec = dataset.spec;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto& side = in_train[i] ? train : test;
    side.xs.push_back(dataset.xs[i]);
    side.labels.push_back(dataset.labels[i]);
  }
  train.spec.size = train.size();
  test.spec.size = test.size();
  return {std::move(train), std::move(test)};
}

double dataset_overlap(const LabelledDataset& a, const LabelledDataset& b) {
  if (a.size() == 0) return 0.0;
  std::unordered_set<BitString> other(b.xs.begin(), b.xs.end());
  std::size_t shared = 0;
  for (const auto& x : a.xs) {
    if (other.count(x)) ++shared;
  }
  return static_cast<double>(shared) / a.size();
}

nlohmann::ordered_json spec_to_json(const DatasetSpec& spec) {
  nlohmann::ordered_json j;
  j["rubric"] = spec.rubric_id;
  j["sigma"] = {{"kind", spec.sigma.kind == AggregatorSpec::Kind::majority_vote ? "majority_vote"
                                                                                : "custom"},
                {"tie_rule", spec.sigma.tie_rule}};
  j["size"] = spec.size;
  j["bits"] = spec.bit_length;
  j["balanced"] = spec.balanced;
  j["seed"] = spec.seed;
  return j;
}

void write_dataset(const LabelledDataset& dataset, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write dataset file " + csv_path.string());
  out << "x,label\n";
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out << dataset.xs[i].str() << ',' << dataset.labels[i] << '\n';
  }
  out.close();

  std::filesystem::path sidecar = csv_path;
  sidecar.replace_extension(".spec.json");
  std::ofstream side(sidecar, std::ios::binary);
  if (!side) throw ConfigError("cannot write dataset sidecar " + sidecar.string());
  side << spec_to_json(dataset.spec).dump(2) << '\n';
}

LabelledDataset read_dataset_csv(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("cannot open dataset file " + csv_path.string());
  LabelledDataset out;
  std::string line;
  if (!std::getline(in, line) || line != "x,label") {
    throw FormatError("dataset file " + csv_path.string() + " must start with header \"x,label\"");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw FormatError("dataset row without a comma: \"" + line + "\"");
    }
    out.xs.push_back(BitString::parse(line.substr(0, comma)));
    const std::string label = line.substr(comma + 1);
    if (label != "0" && label != "1") {
      throw FormatError("dataset label must be 0 or 1, got \"" + label + "\"");
    }
    out.labels.push_back(label == "1" ? 1 : 0);
  }
  if (out.xs.empty()) throw FormatError("dataset file " + csv_path.string() + " has no rows");
  out.spec.size = out.size();
  out.spec.bit_length = out.xs.front().size();
  return out;
}

}  // namespace nodata
