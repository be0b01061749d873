#include "nodata/protocol.hpp"

#include "nodata/errors.hpp"
#include "nodata/evaluator.hpp"
#include "nodata/rng.hpp"

namespace nodata {

std::string_view challenge_name(ChallengeKind kind) {
  return kind == ChallengeKind::permutation ? "permutation" : "isomorphism";
}

double normalized_hamming(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) {
    throw ConfigError("normalized_hamming requires equal-length encodings");
  }
  if (a.empty()) return 0.0;
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.bit(i) != b.bit(i)) ++diff;
  }
  return static_cast<double>(diff) / static_cast<double>(a.size());
}

double discrete_distance(const BitString& a, const BitString& b) {
  return a == b ? 0.0 : 1.0;
}

namespace {

std::vector<WitnessMatch> match_direction(const std::set<BitString>& from,
                                          const std::set<BitString>& to,
                                          const TotalRubric& tr) {
  std::vector<std::pair<BitString, BitString>> targets;  // (total evaluation, t)
  targets.reserve(to.size());
  for (const auto& t : to) targets.emplace_back(total_encode(tr, t), t);

  std::vector<WitnessMatch> out;
  out.reserve(from.size());
  for (const auto& s : from) {
    const BitString te = total_encode(tr, s);
    WitnessMatch m{s, std::nullopt};
    for (const auto& [tte, t] : targets) {
      if (tte == te) {
        m.matched = t;
        break;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

bool all_matched(const std::vector<WitnessMatch>& matches) {
  for (const auto& m : matches) {
    if (!m.matched) return false;
  }
  return true;
}

}  // namespace

Challenge1Result challenge1_check(const BitString& x, const BitString& x_prime,
                                  const TotalRubric& tr, const Challenge1Options& options) {
  if (x.empty() || x_prime.empty()) {
    throw ConfigError("challenge1_check requires non-empty strings");
  }
  const RelevantSubsetSet sx = relevant_subsets(tr, x, options.witnesses);
  const RelevantSubsetSet sxp = relevant_subsets(tr, x_prime, options.witnesses);

  Challenge1Result result;
  result.evidence.symmetric = options.symmetric;
  result.evidence.forward = match_direction(sx.subsets, sxp.subsets, tr);
  result.passed = all_matched(result.evidence.forward);
  if (options.symmetric) {
    result.evidence.backward = match_direction(sxp.subsets, sx.subsets, tr);
    result.passed = result.passed && all_matched(result.evidence.backward);
  }
  return result;
}

Challenge2Result challenge2_check(const BitString& x, const BitString& x_prime,
                                  const Rubric& rubric, const DistancePolicy& policy) {
  if (x.empty() || x_prime.empty()) {
    throw ConfigError("challenge2_check requires non-empty strings");
  }
  Challenge2Result result;
  result.evidence.encoding_x = encode(rubric, x);
  result.evidence.encoding_x_prime = encode(rubric, x_prime);
  if (policy.mode == DistancePolicy::Mode::strict_equality) {
    result.passed = result.evidence.encoding_x == result.evidence.encoding_x_prime;
  } else {
    const auto& metric = policy.metric;
    const double d = metric ? metric(result.evidence.encoding_x, result.evidence.encoding_x_prime)
                            : normalized_hamming(result.evidence.encoding_x,
                                                 result.evidence.encoding_x_prime);
    result.evidence.distance = d;
    // Failure whenever distance >= epsilon, as specified; epsilon = 0 never passes.
    result.passed = d < policy.epsilon;
  }
  return result;
}

EvProtocol::EvProtocol(Rubric rubric, DistancePolicy policy, ProtocolOptions options)
    : rubric_(std::move(rubric)),
      total_(totalize(rubric_)),
      policy_(std::move(policy)),
      options_(options) {}

EvOutcome EvProtocol::run(const BitString& x, const EvaluatorProfile& evaluator, int rounds,
                          std::uint64_t session_seed) const {
  if (rounds < 1) throw ConfigError("EV protocol needs at least one round");
  if (x.empty()) throw ConfigError("EV protocol requires a non-empty datapoint");

  Rng challenge_rng(Rng::mix(session_seed, StreamTag::challenge));
  Rng generation_rng(Rng::mix(session_seed, StreamTag::generation));
  Rng label_rng(Rng::mix(session_seed, StreamTag::label));

  EvOutcome out;
  const std::optional<int> label = evaluator.label(x, label_rng);
  out.revealed_label = label.value_or(0);
  if (!label.has_value()) {
    // Adapter failure on the label query: the datapoint is failed outright.
    out.success = false;
    return out;
  }

  const Challenge1Options c1{options_.witnesses, options_.symmetric_challenge1};
  for (int i = 1; i <= rounds; ++i) {
    RoundTranscript t;
    t.round_index = i;

    RoundContext ctx{i, generation_rng};
    const std::optional<Commitment> commitment = evaluator.generate(x, ctx);
    if (commitment.has_value()) t.commitment = *commitment;

    // The challenge draw happens strictly after the commitment is locked.
    t.challenge = challenge_rng.next_bit() == 0 ? ChallengeKind::permutation
                                                : ChallengeKind::isomorphism;
    if (!commitment.has_value()) {
      t.adapter_failure = true;
      t.passed = false;
    } else if (t.challenge == ChallengeKind::permutation) {
      Challenge1Result r = challenge1_check(x, commitment->x_prime, total_, c1);
      t.passed = r.passed;
      t.details = std::move(r.evidence);
    } else {
      Challenge2Result r = challenge2_check(x, commitment->x_prime, rubric_, policy_);
      t.passed = r.passed;
      t.details = std::move(r.evidence);
    }

    const bool passed = t.passed;
    out.rounds.push_back(std::move(t));
    if (!passed) {
      out.success = false;
      return out;
    }
  }
  out.success = true;
  return out;
}

namespace {

nlohmann::ordered_json matches_to_json(const std::vector<WitnessMatch>& matches) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& m : matches) {
    nlohmann::ordered_json e;
    e["s"] = m.witness.str();
    if (m.matched) {
      e["t"] = m.matched->str();
    } else {
      e["t"] = nullptr;
    }
    arr.push_back(std::move(e));
  }
  return arr;
}

}  // namespace

nlohmann::ordered_json transcript_to_json(const EvOutcome& outcome) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : outcome.rounds) {
    nlohmann::ordered_json e;
    e["round"] = r.round_index;
    e["x_prime"] = r.commitment.x_prime.str();
    e["partial_label"] = r.commitment.partial_label;
    e["challenge"] = std::string(challenge_name(r.challenge));
    e["passed"] = r.passed;
    if (r.adapter_failure) {
      e["evidence"] = nlohmann::ordered_json{{"kind", "adapter_failure"}};
    } else if (const auto* c1 = std::get_if<Challenge1Evidence>(&r.details)) {
      nlohmann::ordered_json ev;
      ev["kind"] = "witness_match";
      ev["symmetric"] = c1->symmetric;
      ev["forward"] = matches_to_json(c1->forward);
      if (c1->symmetric) ev["backward"] = matches_to_json(c1->backward);
      e["evidence"] = std::move(ev);
    } else if (const auto* c2 = std::get_if<Challenge2Evidence>(&r.details)) {
      nlohmann::ordered_json ev;
      ev["kind"] = "encoding";
      ev["enc_x"] = c2->encoding_x.str();
      ev["enc_x_prime"] = c2->encoding_x_prime.str();
      if (c2->distance) ev["distance"] = *c2->distance;
      e["evidence"] = std::move(ev);
    } else {
      e["evidence"] = nullptr;
    }
    arr.push_back(std::move(e));
  }
  return arr;
}

}  // namespace nodata
