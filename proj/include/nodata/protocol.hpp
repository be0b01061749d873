#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nodata/rubric.hpp"

namespace nodata {

/// The two verifier challenges. "permutation" tests structure over witness
/// substrings; "isomorphism" tests the rubric encoding itself.
enum class ChallengeKind { permutation, isomorphism };

std::string_view challenge_name(ChallengeKind kind);

/// What an evaluator locks in at the start of a round: the generated
/// datapoint and its partial label. Immutable once issued.
struct Commitment {
  BitString x_prime;
  int partial_label = 0;
};

/// Pass condition for Challenge 2. strict_equality demands identical
/// encodings; metric mode passes when distance(enc_x, enc_x') < epsilon
/// (so epsilon = 0 rejects everything, including identical encodings).
struct DistancePolicy {
  enum class Mode { strict_equality, metric };

  Mode mode = Mode::strict_equality;
  double epsilon = 0.25;
  /// Distance over encodings in [0, 1]; null means normalized Hamming.
  std::function<double(const BitString&, const BitString&)> metric;
};

double normalized_hamming(const BitString& a, const BitString& b);
double discrete_distance(const BitString& a, const BitString& b);

struct Challenge1Options {
  WitnessOptions witnesses;
  /// When true the witness check runs in both directions. The
  /// one-directional form (forall s in S_x exists t in S_x') remains the
  /// primitive; symmetric is the conjunction of both directions.
  bool symmetric = true;
};

struct WitnessMatch {
  BitString witness;
  std::optional<BitString> matched;  // first total-evaluation match, if any
};

struct Challenge1Evidence {
  std::vector<WitnessMatch> forward;   // witnesses of x against S_x'
  std::vector<WitnessMatch> backward;  // filled in symmetric mode
  bool symmetric = false;
};

struct Challenge1Result {
  bool passed = false;
  Challenge1Evidence evidence;
};

/// Challenge 1: every witness substring of x must have some witness of x'
/// with an identical total evaluation.
Challenge1Result challenge1_check(const BitString& x, const BitString& x_prime,
                                  const TotalRubric& tr, const Challenge1Options& options = {});

struct Challenge2Evidence {
  BitString encoding_x;
  BitString encoding_x_prime;
  std::optional<double> distance;  // metric mode only
};

struct Challenge2Result {
  bool passed = false;
  Challenge2Evidence evidence;
};

/// Challenge 2: the rubric encodings of x and x' must agree (or be within
/// epsilon under the configured metric).
Challenge2Result challenge2_check(const BitString& x, const BitString& x_prime,
                                  const Rubric& rubric, const DistancePolicy& policy = {});

struct RoundTranscript {
  int round_index = 0;  // 1-based
  Commitment commitment;
  ChallengeKind challenge = ChallengeKind::permutation;
  bool passed = false;
  bool adapter_failure = false;
  std::variant<std::monostate, Challenge1Evidence, Challenge2Evidence> details;
};

struct EvOutcome {
  bool success = false;
  int revealed_label = 0;  // always present, regardless of success
  std::vector<RoundTranscript> rounds;
};

/// Stream tags hung off a session seed. Keeping the verifier's challenge
/// stream separate from the evaluator's generation stream makes the challenge
/// sequence independent of evaluator behaviour, and makes parallel and serial
/// execution identical.
struct StreamTag {
  static constexpr std::uint64_t challenge = 1;
  static constexpr std::uint64_t generation = 2;
  static constexpr std::uint64_t label = 3;
  static constexpr std::uint64_t flip = 4;
};

struct ProtocolOptions {
  WitnessOptions witnesses;
  bool symmetric_challenge1 = true;
};

class EvaluatorProfile;

/// The verifier side of the per-datapoint sub-game: r rounds of
/// commit-then-challenge, aborting on the first failed round.
class EvProtocol {
 public:
  explicit EvProtocol(Rubric rubric, DistancePolicy policy = {}, ProtocolOptions options = {});

  /// Runs the protocol for one datapoint. The evaluator's label is queried
  /// exactly once, up front, and surfaced as revealed_label; a label query
  /// failure marks the datapoint failed without running any rounds.
  EvOutcome run(const BitString& x, const EvaluatorProfile& evaluator, int rounds,
                std::uint64_t session_seed) const;

  const Rubric& rubric() const { return rubric_; }
  const TotalRubric& total_rubric() const { return total_; }
  const DistancePolicy& policy() const { return policy_; }
  const ProtocolOptions& options() const { return options_; }

 private:
  Rubric rubric_;
  TotalRubric total_;
  DistancePolicy policy_;
  ProtocolOptions options_;
};

/// Transcript export: one record per executed round, byte-stable for a fixed
/// seed so transcripts can be golden-file tested.
nlohmann::ordered_json transcript_to_json(const EvOutcome& outcome);

}  // namespace nodata
