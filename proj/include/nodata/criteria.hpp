#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nodata/bitstring.hpp"

namespace nodata {

/// The predicate forms a criterion may take. Every predicate is total over
/// bit strings of any length >= 1, which matters because Challenge 1
/// evaluates criteria on substrings of the datapoint.
enum class PredicateKind {
  even_ones,      // parity(ones): 1 iff the number of ones is even
  starts_with,    // starts_with(pattern)
  ends_with,      // ends_with(pattern)
  contains,       // contains(pattern)
  count_ones_gt,  // count_ones_gt(k): 1 iff popcount > k
};

struct PredicateSpec {
  PredicateKind kind = PredicateKind::even_ones;
  BitString pattern;        // starts_with / ends_with / contains
  long long threshold = 0;  // count_ones_gt

  /// Parses the textual form used in rubric files, e.g. "parity(ones)",
  /// "contains(10101)", "count_ones_gt(5)".
  static PredicateSpec parse(std::string_view text);
  std::string text() const;

  int eval(const BitString& s) const;
};

/// Boolean connective for compound criteria.
enum class Combiner { xor_op, and_op, or_op };

Combiner combiner_from_name(std::string_view name);
std::string_view combiner_name(Combiner c);

/// Which witnesses substring-pattern criteria contribute to the relevant
/// subset set. Prefix/suffix and whole-string witnesses are always on.
enum class PatternWitnessMode {
  off,            // pattern criteria contribute nothing
  matching_only,  // only windows that equal the pattern
  all_windows,    // every window of the pattern's length
};

/// One boolean criterion over bit strings. Atomic criteria hold a predicate;
/// compound criteria combine sub-clauses with a connective. Immutable.
class Criterion {
 public:
  static std::shared_ptr<const Criterion> atomic(std::string id, PredicateSpec spec);
  static std::shared_ptr<const Criterion> compound(
      std::string id, Combiner combiner,
      std::vector<std::shared_ptr<const Criterion>> clauses);

  const std::string& id() const { return id_; }
  bool is_compound() const { return compound_; }
  const PredicateSpec& predicate() const;
  Combiner combiner() const;
  const std::vector<std::shared_ptr<const Criterion>>& clauses() const { return clauses_; }

  /// Deterministic evaluation; for compounds this is the connective applied
  /// to the clause evaluations.
  int evaluate(const BitString& s) const;

  /// Inserts this criterion's witness substrings of x into out. May insert
  /// nothing (e.g. pattern witnesses off); witnesses() applies the {x}
  /// fallback that keeps extractors non-empty.
  void collect_witnesses(const BitString& x, PatternWitnessMode mode,
                         std::set<BitString>& out) const;

  std::set<BitString> witnesses(const BitString& x, PatternWitnessMode mode) const;

 private:
  Criterion() = default;

  std::string id_;
  bool compound_ = false;
  PredicateSpec spec_;
  Combiner combiner_ = Combiner::xor_op;
  std::vector<std::shared_ptr<const Criterion>> clauses_;
};

using CriterionPtr = std::shared_ptr<const Criterion>;

}  // namespace nodata
