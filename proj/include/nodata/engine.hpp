#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nodata/evaluator.hpp"
#include "nodata/protocol.hpp"

namespace nodata {

struct AlgoConfig {
  int rounds = 3;
  double phi = 0.5;
  std::uint64_t seed = 0;
  DistancePolicy policy;
  ProtocolOptions options;
  int workers = 1;
};

struct DatapointRecord {
  BitString x;
  int predicted = 0;
  bool success = false;
  bool flipped = false;  // only ever true on failed datapoints
};

struct Metrics {
  double accuracy = 0.0;
  double f1 = 0.0;
};

/// The run's primary output: one record and one transcript per datapoint (in
/// dataset order), the tallies, and optional metrics against supplied truth.
struct RunReport {
  std::vector<DatapointRecord> records;
  std::vector<EvOutcome> transcripts;  // parallel to records
  double success_rate = 0.0;
  double flip_rate = 0.0;
  std::optional<double> accuracy;
  std::optional<double> f1;
  std::uint64_t seed = 0;
  long total_sessions = 0;
  /// Echoed verbatim into the report JSON; filled by the caller.
  nlohmann::ordered_json config_echo = nlohmann::ordered_json::object();
};

/// Runs the EV protocol over every datapoint, flipping the revealed label of
/// failed datapoints with probability phi. Deterministic for a fixed
/// (dataset, profile, config) regardless of worker count.
RunReport run_no_data(const std::vector<BitString>& dataset, const EvaluatorProfile& evaluator,
                      const Rubric& rubric, const AlgoConfig& cfg,
                      const std::optional<std::vector<int>>& truth = std::nullopt);

/// Probability that the verifier misses a lie after r rounds: exactly 4^-r.
double lemma_bound(int rounds);

struct BoundInputs {
  double alpha = 1.0;  // evaluator accuracy
  double phi = 0.5;
  int rounds = 3;

  double error_rate() const { return 1.0 - alpha; }
};

/// Expected-accuracy upper bound 1 - (1-alpha) * (1 - phi + phi * 4^-r).
double theorem_bound(const BoundInputs& b);

/// Accuracy plus binary F1 on positive class 1 (or macro-averaged F1).
Metrics compute_metrics(const std::vector<int>& predictions, const std::vector<int>& truth,
                        bool macro_f1 = false);

/// One binary pass per peeled label for k-ary label sets.
struct KaryFamily {
  std::vector<Rubric> pass_rubrics;               // size k-1
  std::vector<EvaluatorProfile> pass_evaluators;  // size k-1
};

struct KaryReport {
  std::vector<int> labels;  // in 1..k
  std::vector<RunReport> passes;
  long total_sessions = 0;
};

/// Runs k-1 binary passes over the full dataset, peeling labels in ascending
/// order: pass j maps {l_j} to 0 and the rest to 1, and a datapoint's final
/// label is the first peeled label it receives (else l_k).
KaryReport run_kary(const std::vector<BitString>& dataset, const KaryFamily& family, int k,
                    const AlgoConfig& cfg);

/// Stable-field-order report JSON.
nlohmann::ordered_json report_to_json(const RunReport& report);

/// Reconstructs enough of a report from its JSON to re-render the table.
RunReport report_from_json(const nlohmann::json& j);

/// The two-row table in the style used throughout the result tables:
/// Successes/Flips and Accuracy/F1, percentages with one decimal.
std::string render_report_table(const RunReport& report);

}  // namespace nodata
