#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "nodata/criteria.hpp"

namespace nodata {

/// Maps a rubric encoding to the final label.
struct AggregatorSpec {
  enum class Kind { majority_vote, custom };

  Kind kind = Kind::majority_vote;
  /// Label returned when a majority vote ties (only reachable for
  /// even-length encodings).
  int tie_rule = 0;
  /// Used iff kind == custom.
  std::function<int(const BitString&)> custom_fn;
};

/// Applies the aggregator to an encoding. The encoding must be non-empty.
int aggregate(const AggregatorSpec& sigma, const BitString& encoding);

/// An ordered list of criteria with unique ids. Encoding position i always
/// corresponds to criteria()[i].
class Rubric {
 public:
  Rubric(std::string id, std::vector<CriterionPtr> criteria);

  const std::string& id() const { return id_; }
  const std::vector<CriterionPtr>& criteria() const { return criteria_; }
  std::size_t size() const { return criteria_.size(); }

 private:
  std::string id_;
  std::vector<CriterionPtr> criteria_;
};

/// Concatenated criterion outputs in rubric order; |result| == rubric.size().
BitString encode(const Rubric& rubric, const BitString& x);

/// The rubric with every compound criterion decomposed into its clauses.
/// Order: source atomics in source order, then per compound (in source
/// order) its clauses followed by the compound itself; duplicates dropped.
class TotalRubric {
 public:
  TotalRubric(std::string source_id, std::vector<CriterionPtr> criteria);

  const std::string& source_id() const { return source_id_; }
  const std::vector<CriterionPtr>& criteria() const { return criteria_; }
  std::size_t size() const { return criteria_.size(); }

 private:
  std::string source_id_;
  std::vector<CriterionPtr> criteria_;
};

TotalRubric totalize(const Rubric& rubric);

/// Concatenated total-rubric criterion outputs on s; this is the total
/// evaluation Challenge 1 compares on witness substrings.
BitString total_encode(const TotalRubric& tr, const BitString& s);

struct WitnessOptions {
  PatternWitnessMode pattern_mode = PatternWitnessMode::all_windows;
};

/// The witness substrings of x inspected by the total rubric.
struct RelevantSubsetSet {
  std::set<BitString> subsets;
  BitString origin;

  bool contains(const BitString& s) const { return subsets.count(s) > 0; }
};

/// Union of every criterion's witnesses plus {x} itself. Deterministic; every
/// element is a contiguous substring of x (or x).
RelevantSubsetSet relevant_subsets(const TotalRubric& tr, const BitString& x,
                                   const WitnessOptions& options = {});

}  // namespace nodata
