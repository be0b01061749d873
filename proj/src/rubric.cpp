#include "nodata/rubric.hpp"

#include <unordered_set>

#include "nodata/errors.hpp"

namespace nodata {

int aggregate(const AggregatorSpec& sigma, const BitString& encoding) {
  if (encoding.empty()) {
    throw ConfigError("aggregate requires a non-empty encoding");
  }
  if (sigma.kind == AggregatorSpec::Kind::custom) {
    if (!sigma.custom_fn) throw ConfigError("custom aggregator has no function");
    return sigma.custom_fn(encoding);
  }
  const std::size_t ones = encoding.popcount();
  if (2 * ones > encoding.size()) return 1;
  if (2 * ones < encoding.size()) return 0;
  return sigma.tie_rule;
}

Rubric::Rubric(std::string id, std::vector<CriterionPtr> criteria)
    : id_(std::move(id)), criteria_(std::move(criteria)) {
  std::unordered_set<std::string> ids;
  for (const auto& c : criteria_) {
    if (!c) throw ConfigError("rubric \"" + id_ + "\" contains a null criterion");
    if (!ids.insert(c->id()).second) {
      throw ConfigError("rubric \"" + id_ + "\" has duplicate criterion id \"" + c->id() + "\"");
    }
  }
}

BitString encode(const Rubric& rubric, const BitString& x) {
  if (x.empty()) throw ConfigError("encode requires a non-empty datapoint");
  std::string out;
  out.reserve(rubric.size());
  for (const auto& c : rubric.criteria()) {
    out.push_back(c->evaluate(x) ? '1' : '0');
  }
  return BitString(std::move(out));
}

TotalRubric::TotalRubric(std::string source_id, std::vector<CriterionPtr> criteria)
    : source_id_(std::move(source_id)), criteria_(std::move(criteria)) {}

namespace {

void append_expanded(const CriterionPtr& c, std::vector<CriterionPtr>& out,
                     std::unordered_set<std::string>& seen) {
  if (c->is_compound()) {
    for (const auto& clause : c->clauses()) append_expanded(clause, out, seen);
  }
  if (seen.insert(c->id()).second) out.push_back(c);
}

}  // namespace

TotalRubric totalize(const Rubric& rubric) {
  std::vector<CriterionPtr> out;
  std::unordered_set<std::string> seen;
  for (const auto& c : rubric.criteria()) {
    if (!c->is_compound() && seen.insert(c->id()).second) out.push_back(c);
  }
  for (const auto& c : rubric.criteria()) {
    if (c->is_compound()) append_expanded(c, out, seen);
  }
  return TotalRubric(rubric.id(), std::move(out));
}

BitString total_encode(const TotalRubric& tr, const BitString& s) {
  if (s.empty()) throw ConfigError("total_encode requires a non-empty string");
  std::string out;
  out.reserve(tr.size());
  for (const auto& c : tr.criteria()) {
    out.push_back(c->evaluate(s) ? '1' : '0');
  }
  return BitString(std::move(out));
}

RelevantSubsetSet relevant_subsets(const TotalRubric& tr, const BitString& x,
                                   const WitnessOptions& options) {
  if (x.empty()) throw ConfigError("relevant_subsets requires a non-empty datapoint");
  RelevantSubsetSet out;
  out.origin = x;
  for (const auto& c : tr.criteria()) {
    c->collect_witnesses(x, options.pattern_mode, out.subsets);
  }
  out.subsets.insert(x);
  return out;
}

}  // namespace nodata
