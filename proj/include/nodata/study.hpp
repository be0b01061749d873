#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nodata/datagen.hpp"
#include "nodata/evaluator.hpp"

namespace nodata {

/// Monte Carlo soundness study: empirical EV success rates of a profile as
/// the round count grows, against the closed-form references.
struct DecayStudyConfig {
  std::string profile = "pure_cheat";
  std::string rubric_id = "ip";
  std::vector<int> rounds_sweep = {1, 2, 3, 4};
  int trials = 10000;  // per sweep point; must be >= 1000
  std::uint64_t seed = 0;
  std::size_t bits = 10;
  std::size_t corpus_size = 498;
  DistancePolicy policy;
  ProtocolOptions options;
  AggregatorSpec sigma;
};

struct DecayPoint {
  int rounds = 0;
  double success_rate = 0.0;
  double ci_low = 0.0;   // normal-approximation 95% interval
  double ci_high = 0.0;
  double reference_half = 0.0;     // (1/2)^r: prepared-for-one-challenge, zero luck
  double reference_quarter = 0.0;  // 4^-r: the closed-form miss bound
  double challenge1_pass_rate = 0.0;  // over all commitments, drawn or not
  double challenge2_pass_rate = 0.0;
  long skipped_datapoints = 0;
};

struct DecayStudy {
  std::string profile;
  std::string rubric_id;
  std::vector<DecayPoint> points;
  /// Pass rate of the weaker check: the "luck" probability of a
  /// single-challenge cheat.
  double luck_rate = 0.0;
  bool monotone_decay = false;
  bool quarter_envelope_valid = false;
  std::string caveat;
};

DecayStudy run_decay_study(const Rubric& rubric, const DecayStudyConfig& cfg);

nlohmann::ordered_json study_to_json(const DecayStudy& study);

}  // namespace nodata
