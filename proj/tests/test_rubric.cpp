#include <doctest.h>

#include "nodata/errors.hpp"
#include "nodata/rubric.hpp"
#include "nodata/rubric_io.hpp"

using namespace nodata;

namespace {

BitString bits(const char* s) { return BitString::parse(s); }

}  // namespace

TEST_CASE("built-in criteria evaluate the documented examples") {
  const Rubric ip = builtin_rubric("ip");
  const auto& c0 = ip.criteria()[0];
  const auto& c1 = ip.criteria()[1];

  // "1111110000" has six ones (even) and satisfies neither c1 clause.
  CHECK(c0->evaluate(bits("1111110000")) == 1);
  CHECK(c1->evaluate(bits("1111110000")) == 0);

  // Determinism: repeated evaluation gives identical bits.
  for (const auto& c : ip.criteria()) {
    const BitString x = bits("0110100101");
    CHECK(c->evaluate(x) == c->evaluate(x));
  }
}

TEST_CASE("encode concatenates criterion outputs in rubric order") {
  const Rubric ip = builtin_rubric("ip");
  const Rubric oop = builtin_rubric("oop");

  CHECK(encode(ip, bits("1111110000")).str() == "101");
  CHECK(encode(oop, bits("0001110001")).str() == "111");

  const Rubric empty("empty", {});
  CHECK(encode(empty, bits("0101")).empty());
}

TEST_CASE("encoding length equals rubric size for every input up to n=8") {
  const Rubric ip = builtin_rubric("ip");
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
      CHECK(encode(ip, BitString::from_value(v, n)).size() == ip.size());
    }
  }
}

TEST_CASE("totalize expands compounds after the source atomics") {
  const Rubric ip = builtin_rubric("ip");
  const TotalRubric total = totalize(ip);
  REQUIRE(total.size() == 5);
  CHECK(total.criteria()[0]->id() == "c0");
  CHECK(total.criteria()[1]->id() == "c2");
  CHECK(total.criteria()[2]->id() == "c1a");
  CHECK(total.criteria()[3]->id() == "c1b");
  CHECK(total.criteria()[4]->id() == "c1");

  const Rubric oop = builtin_rubric("oop");
  const TotalRubric oop_total = totalize(oop);
  CHECK(oop_total.size() == 3);
  for (std::size_t i = 0; i < oop.size(); ++i) {
    CHECK(oop_total.criteria()[i]->id() == oop.criteria()[i]->id());
  }
}

TEST_CASE("total evaluation keeps the compound equal to its clause combiner") {
  const Rubric ip = builtin_rubric("ip");
  const TotalRubric total = totalize(ip);

  const BitString te = total_encode(total, bits("1111110000"));
  REQUIRE(te.size() == 5);
  CHECK(te.str() == "11000");
  CHECK(te.bit(4) == (te.bit(2) ^ te.bit(3)));

  // Exhaustive check at small n: the compound bit always equals the xor of
  // its clause bits.
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
      const BitString e = total_encode(total, BitString::from_value(v, n));
      CHECK(e.bit(4) == (e.bit(2) ^ e.bit(3)));
    }
  }
}

TEST_CASE("majority aggregation with the fixed tie rule") {
  AggregatorSpec sigma;
  CHECK(aggregate(sigma, bits("101")) == 1);
  CHECK(aggregate(sigma, bits("010")) == 0);
  CHECK(aggregate(sigma, bits("10")) == 0);  // tie resolves to tie_rule
  sigma.tie_rule = 1;
  CHECK(aggregate(sigma, bits("10")) == 1);
  CHECK_THROWS_AS(aggregate(sigma, BitString()), ConfigError);
}

TEST_CASE("majority is monotone: raising a zero never drops the label") {
  AggregatorSpec sigma;
  for (std::size_t n = 1; n <= 6; ++n) {
    for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
      BitString enc = BitString::from_value(v, n);
      const int before = aggregate(sigma, enc);
      for (std::size_t i = 0; i < n; ++i) {
        if (enc.bit(i) == 0) {
          BitString raised = enc;
          raised.flip_bit(i);
          CHECK(aggregate(sigma, raised) >= before);
        }
      }
    }
  }
}

TEST_CASE("labelling is a deterministic total function of the datapoint") {
  const Rubric ip = builtin_rubric("ip");
  AggregatorSpec sigma;
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const BitString x = BitString::random(rng, 10);
    CHECK(aggregate(sigma, encode(ip, x)) == aggregate(sigma, encode(ip, x)));
  }
}

TEST_CASE("relevant subsets contain the origin and the pattern windows") {
  const Rubric oop = builtin_rubric("oop");
  const TotalRubric total = totalize(oop);
  const BitString x = bits("0001110001");

  const RelevantSubsetSet s = relevant_subsets(total, x);
  CHECK(s.contains(x));
  CHECK(s.contains(bits("111")));
  CHECK(s.contains(bits("110001")));

  // Every witness is a contiguous substring of the origin.
  for (const auto& w : s.subsets) {
    CHECK(x.contains(w));
  }
}

TEST_CASE("matching-only witnesses fall back to the origin alone") {
  // A rubric whose pattern criterion misses and whose other criterion
  // inspects the whole string: nothing but {x} remains.
  const Rubric r("patterns", {Criterion::atomic("p", PredicateSpec::parse("contains(111)")),
                              Criterion::atomic("q", PredicateSpec::parse("parity(ones)"))});
  const TotalRubric total = totalize(r);
  WitnessOptions opts;
  opts.pattern_mode = PatternWitnessMode::matching_only;

  const RelevantSubsetSet s = relevant_subsets(total, bits("0000000000"), opts);
  CHECK(s.subsets.size() == 1);
  CHECK(s.contains(bits("0000000000")));

  // With a match present the pattern itself is the witness.
  const RelevantSubsetSet hit = relevant_subsets(total, bits("0011100000"), opts);
  CHECK(hit.contains(bits("111")));
  CHECK(hit.subsets.size() == 2);
}

TEST_CASE("per-criterion witness extractors never come back empty") {
  const Rubric ip = builtin_rubric("ip");
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const BitString x = BitString::random(rng, 10);
    for (const auto& c : ip.criteria()) {
      for (auto mode : {PatternWitnessMode::off, PatternWitnessMode::matching_only,
                        PatternWitnessMode::all_windows}) {
        CHECK_FALSE(c->witnesses(x, mode).empty());
      }
    }
  }
}

TEST_CASE("compound construction validates its clauses") {
  CHECK_THROWS_AS(Criterion::compound("bad", Combiner::xor_op, {}), ConfigError);
  const Rubric dup_check("r", {Criterion::atomic("a", PredicateSpec::parse("parity(ones)"))});
  CHECK_THROWS_AS(Rubric("r", {dup_check.criteria()[0], dup_check.criteria()[0]}), ConfigError);
}

TEST_CASE("predicate DSL round-trips through its text form") {
  for (const char* text : {"parity(ones)", "starts_with(0)", "ends_with(1)", "contains(10101)",
                           "count_ones_gt(5)", "count_ones_gt(-1)"}) {
    CHECK(PredicateSpec::parse(text).text() == text);
  }
  CHECK_THROWS_AS(PredicateSpec::parse("frobnicate(1)"), FormatError);
  CHECK_THROWS_AS(PredicateSpec::parse("contains()"), FormatError);
  CHECK_THROWS_AS(PredicateSpec::parse("count_ones_gt(five)"), FormatError);
}
