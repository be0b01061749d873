#include <doctest.h>

#include <cmath>

#include "nodata/datagen.hpp"
#include "nodata/engine.hpp"
#include "nodata/errors.hpp"
#include "nodata/rubric_io.hpp"

using namespace nodata;

namespace {

LabelledDataset ip_dataset(std::uint64_t seed, std::size_t size = 200) {
  DatasetSpec spec;
  spec.size = size;
  spec.bit_length = 10;
  spec.balanced = true;
  spec.seed = seed;
  return generate_dataset(builtin_rubric("ip"), spec);
}

}  // namespace

TEST_CASE("lemma bound is exactly 4^-r") {
  CHECK(lemma_bound(0) == 1.0);
  CHECK(lemma_bound(1) == 0.25);
  CHECK(lemma_bound(3) == 0.015625);
  for (int r = 0; r <= 10; ++r) {
    double expected = 1.0;
    for (int i = 0; i < r; ++i) expected /= 4.0;
    CHECK(lemma_bound(r) == expected);
  }
  CHECK_THROWS_AS(lemma_bound(-1), ConfigError);
}

TEST_CASE("theorem bound degenerate cases and the worked value") {
  CHECK(theorem_bound({1.0, 0.3, 2}) == 1.0);
  for (double alpha : {0.0, 0.25, 0.9}) {
    CHECK(theorem_bound({alpha, 0.0, 5}) == alpha);
  }
  // 1 - 0.4 * (0.4 + 0.6 * 0.015625), computed by separate arithmetic.
  const double by_hand = 1.0 - 0.4 * (0.4 + 0.6 * 0.015625);
  CHECK(theorem_bound({0.6, 0.6, 3}) == doctest::Approx(0.83625).epsilon(1e-12));
  CHECK(theorem_bound({0.6, 0.6, 3}) == by_hand);
  CHECK_THROWS_AS(theorem_bound({1.5, 0.5, 3}), ConfigError);
}

TEST_CASE("theorem bound is monotone over the grid") {
  for (int ai = 0; ai <= 10; ++ai) {
    for (int pi = 0; pi <= 10; ++pi) {
      for (int r = 1; r <= 6; ++r) {
        const double base = theorem_bound({ai / 10.0, pi / 10.0, r});
        if (ai < 10) CHECK(theorem_bound({(ai + 1) / 10.0, pi / 10.0, r}) >= base);
        if (pi < 10) CHECK(theorem_bound({ai / 10.0, (pi + 1) / 10.0, r}) >= base);
        CHECK(theorem_bound({ai / 10.0, pi / 10.0, r + 1}) >= base);
      }
    }
  }
}

TEST_CASE("metrics match the worked confusion matrices") {
  CHECK(compute_metrics({1, 0, 1}, {1, 0, 1}).accuracy == 1.0);
  CHECK(compute_metrics({1, 0, 1}, {1, 0, 1}).f1 == 1.0);

  const Metrics zeros = compute_metrics({0, 0, 0, 0}, {1, 0, 1, 0});
  CHECK(zeros.accuracy == 0.5);
  CHECK(zeros.f1 == 0.0);

  const Metrics half = compute_metrics({1, 1, 0, 0}, {1, 0, 0, 1});
  CHECK(half.accuracy == 0.5);
  CHECK(half.f1 == 0.5);

  CHECK_THROWS_AS(compute_metrics({1}, {1, 0}), ConfigError);
  CHECK_THROWS_AS(compute_metrics({}, {}), ConfigError);

  // Macro averaging folds in the negative class.
  const Metrics macro = compute_metrics({0, 0, 0, 0}, {1, 0, 1, 0}, true);
  CHECK(macro.f1 == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("phi = 0 never flips, and flips only happen on failures") {
  const Rubric ip = builtin_rubric("ip");
  const auto data = ip_dataset(31);
  AlgoConfig cfg;
  cfg.rounds = 3;
  cfg.phi = 0.0;
  cfg.seed = 9;

  const EvaluatorProfile liar = lie2_profile(ip, AggregatorSpec{}, data.xs);
  const RunReport verbatim = run_no_data(data.xs, liar, ip, cfg, data.labels);
  CHECK(verbatim.flip_rate == 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK_FALSE(verbatim.records[i].flipped);
    // lie2 labels honestly, so with phi = 0 predictions are its labels verbatim.
    CHECK(verbatim.records[i].predicted == data.labels[i]);
  }

  cfg.phi = 0.8;
  const RunReport flipped = run_no_data(data.xs, liar, ip, cfg, data.labels);
  CHECK(flipped.flip_rate > 0.0);
  for (const auto& rec : flipped.records) {
    if (rec.flipped) CHECK_FALSE(rec.success);
  }
}

TEST_CASE("success and flip tallies are the record means") {
  const Rubric ip = builtin_rubric("ip");
  const auto data = ip_dataset(32);
  AlgoConfig cfg;
  cfg.rounds = 2;
  cfg.phi = 0.5;
  cfg.seed = 77;
  const RunReport r = run_no_data(data.xs, lie1_profile(ip, AggregatorSpec{}, data.xs), ip, cfg);
  std::size_t successes = 0, flips = 0;
  for (const auto& rec : r.records) {
    successes += rec.success;
    flips += rec.flipped;
  }
  CHECK(r.success_rate == doctest::Approx(double(successes) / data.size()));
  CHECK(r.flip_rate == doctest::Approx(double(flips) / data.size()));
  CHECK(r.records.size() == data.size());
  CHECK(r.transcripts.size() == data.size());
  CHECK_FALSE(r.accuracy.has_value());
}

TEST_CASE("reports are identical across worker counts and reruns") {
  const Rubric ip = builtin_rubric("ip");
  const auto data = ip_dataset(33);
  AlgoConfig cfg;
  cfg.rounds = 3;
  cfg.phi = 0.6;
  cfg.seed = 123;

  const EvaluatorProfile profile = lie1_profile(ip, AggregatorSpec{}, data.xs);
  cfg.workers = 1;
  const RunReport serial = run_no_data(data.xs, profile, ip, cfg, data.labels);
  cfg.workers = 4;
  const RunReport parallel = run_no_data(data.xs, profile, ip, cfg, data.labels);
  CHECK(report_to_json(serial).dump(2) == report_to_json(parallel).dump(2));

  std::string t_serial, t_parallel;
  for (std::size_t i = 0; i < data.size(); ++i) {
    t_serial += transcript_to_json(serial.transcripts[i]).dump();
    t_parallel += transcript_to_json(parallel.transcripts[i]).dump();
  }
  CHECK(t_serial == t_parallel);
}

TEST_CASE("input validation fails before any session runs") {
  const Rubric ip = builtin_rubric("ip");
  const auto data = ip_dataset(34, 60);
  const EvaluatorProfile oracle = oracle_profile(ip, AggregatorSpec{});
  AlgoConfig cfg;
  cfg.seed = 1;

  cfg.rounds = 0;
  CHECK_THROWS_AS(run_no_data(data.xs, oracle, ip, cfg), ConfigError);
  cfg.rounds = 3;
  cfg.phi = 1.5;
  CHECK_THROWS_AS(run_no_data(data.xs, oracle, ip, cfg), ConfigError);
  cfg.phi = 0.5;
  CHECK_THROWS_AS(run_no_data({}, oracle, ip, cfg), ConfigError);
  std::vector<int> short_truth(10, 0);
  CHECK_THROWS_AS(run_no_data(data.xs, oracle, ip, cfg, short_truth), ConfigError);
}

TEST_CASE("increasing phi never hurts coupled accuracy") {
  const Rubric ip = builtin_rubric("ip");
  const auto data = ip_dataset(35);
  const int seeds = 20;

  auto mean_accuracy = [&](double phi) {
    double total = 0.0;
    for (int s = 0; s < seeds; ++s) {
      AlgoConfig cfg;
      cfg.rounds = 3;
      cfg.phi = phi;
      cfg.seed = 9000 + s;
      const EvaluatorProfile profile =
          coupled_profile(ip, AggregatorSpec{}, 0.4, data.xs, cfg.seed);
      total += *run_no_data(data.xs, profile, ip, cfg, data.labels).accuracy;
    }
    return total / seeds;
  };

  const double low = mean_accuracy(0.2);
  const double high = mean_accuracy(0.8);
  CHECK(high >= low - 0.01);
}

TEST_CASE("k = 2 peeling reduces to the binary loop") {
  const Rubric ip = builtin_rubric("ip");
  const auto data = ip_dataset(36, 100);
  AlgoConfig cfg;
  cfg.rounds = 3;
  cfg.phi = 0.0;
  cfg.seed = 4242;

  KaryFamily family;
  family.pass_rubrics.push_back(ip);
  family.pass_evaluators.push_back(oracle_profile(ip, AggregatorSpec{}));
  const KaryReport kr = run_kary(data.xs, family, 2, cfg);

  REQUIRE(kr.passes.size() == 1);
  CHECK(kr.total_sessions == long(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(kr.labels[i] == (kr.passes[0].records[i].predicted == 0 ? 1 : 2));
  }
  CHECK_THROWS_AS(run_kary(data.xs, family, 1, cfg), ConfigError);
  CHECK_THROWS_AS(run_kary(data.xs, family, 3, cfg), ConfigError);
}

TEST_CASE("a 4-label oracle family recovers the ground truth") {
  // Three single-criterion rubrics; the true label is the first pass whose
  // aggregated bit is 0, else 4.
  const std::vector<const char*> specs = {"parity(ones)", "ends_with(1)", "count_ones_gt(4)"};
  KaryFamily family;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    Rubric r("peel" + std::to_string(i + 1),
             {Criterion::atomic("c", PredicateSpec::parse(specs[i]))});
    family.pass_evaluators.push_back(oracle_profile(r, AggregatorSpec{}));
    family.pass_rubrics.push_back(std::move(r));
  }

  Rng rng(12);
  std::vector<BitString> xs;
  std::vector<int> truth;
  for (int i = 0; i < 200; ++i) {
    const BitString x = BitString::random(rng, 10);
    xs.push_back(x);
    int label = 4;
    for (int pass = 0; pass < 3; ++pass) {
      if (aggregate(AggregatorSpec{}, encode(family.pass_rubrics[pass], x)) == 0) {
        label = pass + 1;
        break;
      }
    }
    truth.push_back(label);
  }

  AlgoConfig cfg;
  cfg.rounds = 3;
  cfg.phi = 0.5;
  cfg.seed = 31415;
  const KaryReport kr = run_kary(xs, family, 4, cfg);
  CHECK(kr.passes.size() == 3);
  CHECK(kr.total_sessions == long(3 * xs.size()));
  int agree = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) agree += kr.labels[i] == truth[i];
  CHECK(double(agree) / xs.size() >= 0.99);
}

TEST_CASE("report json round-trips through the renderer") {
  const Rubric ip = builtin_rubric("ip");
  const auto data = ip_dataset(37, 80);
  AlgoConfig cfg;
  cfg.rounds = 3;
  cfg.phi = 0.6;
  cfg.seed = 2024;
  RunReport r = run_no_data(data.xs, noisy_labeller(oracle_profile(ip, AggregatorSpec{}), 0.4),
                            ip, cfg, data.labels);
  r.config_echo["note"] = "test";

  const nlohmann::ordered_json j = report_to_json(r);
  const RunReport back = report_from_json(nlohmann::json::parse(j.dump()));
  CHECK(render_report_table(back) == render_report_table(r));
  CHECK(back.records.size() == r.records.size());

  // Table carries the four statistics with one decimal.
  const std::string table = render_report_table(r);
  CHECK(table.find("Successes/Flips") != std::string::npos);
  CHECK(table.find("Accuracy/F1") != std::string::npos);
  CHECK(table.find("100.0") != std::string::npos);
}
