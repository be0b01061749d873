#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <string>

#include "nodata/datagen.hpp"
#include "nodata/engine.hpp"
#include "nodata/external.hpp"
#include "nodata/rubric_io.hpp"

using namespace nodata;

namespace {

std::string stub(const char* name) {
  const char* dir = std::getenv("NODATA_STUB_DIR");
  REQUIRE_MESSAGE(dir != nullptr, "NODATA_STUB_DIR must point at tests/stubs");
  return std::string("python3 ") + dir + "/" + name;
}

}  // namespace

TEST_CASE("echo stub answers label and generate requests") {
  const EvaluatorProfile ext = external_profile(stub("echo_evaluator.py"));
  Rng rng(1);
  CHECK(*ext.label(BitString::parse("0101"), rng) == 0);

  Rng gen_rng(2);
  RoundContext ctx{1, gen_rng};
  const Commitment c = *ext.generate(BitString::parse("0101"), ctx);
  CHECK(c.x_prime == BitString::parse("0101"));
  CHECK(c.partial_label == 0);
}

TEST_CASE("an external echo evaluator completes a run end to end") {
  const Rubric ip = builtin_rubric("ip");
  DatasetSpec spec;
  spec.size = 20;
  spec.bit_length = 10;
  spec.balanced = true;
  spec.seed = 2;
  const LabelledDataset data = generate_dataset(ip, spec);

  AlgoConfig cfg;
  cfg.rounds = 2;
  cfg.phi = 0.5;
  cfg.seed = 77;
  const RunReport r = run_no_data(data.xs, external_profile(stub("echo_evaluator.py")), ip, cfg,
                                  data.labels);
  // Identity commitments master both challenges; the constant 0 labels score
  // like the balanced base rate.
  CHECK(r.success_rate == 1.0);
  CHECK(*r.accuracy == doctest::Approx(0.5));
}

TEST_CASE("an out-of-range label is a validation failure, not a label") {
  const EvaluatorProfile ext = external_profile(stub("bad_label_evaluator.py"));
  Rng rng(1);
  CHECK_FALSE(ext.label(BitString::parse("0101"), rng).has_value());

  // As part of a session the failed label query fails the datapoint.
  const Rubric ip = builtin_rubric("ip");
  const EvProtocol protocol(ip);
  const EvOutcome out = protocol.run(BitString::parse("0110011010"), ext, 3, 5);
  CHECK_FALSE(out.success);
  CHECK(out.revealed_label == 0);
  CHECK(out.rounds.empty());
}

TEST_CASE("a malformed generated string fails the round, not the process") {
  const EvaluatorProfile ext = external_profile(stub("bad_generate_evaluator.py"));
  Rng rng(1);
  CHECK(*ext.label(BitString::parse("0101"), rng) == 1);

  const Rubric ip = builtin_rubric("ip");
  const EvProtocol protocol(ip);
  const EvOutcome out = protocol.run(BitString::parse("0110011010"), ext, 3, 5);
  CHECK_FALSE(out.success);
  REQUIRE(out.rounds.size() == 1);
  CHECK(out.rounds[0].adapter_failure);
}

TEST_CASE("timeouts surface as adapter failures within the deadline") {
  ExternalOptions opts;
  opts.timeout = std::chrono::milliseconds(300);
  const EvaluatorProfile ext = external_profile(stub("slow_evaluator.py"), opts);
  Rng rng(1);
  const auto start = std::chrono::steady_clock::now();
  CHECK_FALSE(ext.label(BitString::parse("0101"), rng).has_value());
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(elapsed < std::chrono::seconds(5));
}

TEST_CASE("a dead process is an adapter failure") {
  const EvaluatorProfile ext = external_profile("/bin/false");
  Rng rng(1);
  CHECK_FALSE(ext.label(BitString::parse("0101"), rng).has_value());
}
