#include "nodata/study.hpp"

#include <algorithm>
#include <cmath>

#include "nodata/errors.hpp"
#include "nodata/engine.hpp"

namespace nodata {

DecayStudy run_decay_study(const Rubric& rubric, const DecayStudyConfig& cfg) {
  if (cfg.trials < 1000) throw ConfigError("decay studies need at least 1000 trials per point");
  if (cfg.rounds_sweep.empty()) throw ConfigError("rounds sweep must be non-empty");
  for (int r : cfg.rounds_sweep) {
    if (r < 1) throw ConfigError("every sweep point needs rounds >= 1");
  }

  DatasetSpec corpus_spec;
  corpus_spec.rubric_id = rubric.id();
  corpus_spec.sigma = cfg.sigma;
  corpus_spec.size = cfg.corpus_size;
  corpus_spec.bit_length = cfg.bits;
  corpus_spec.balanced = true;
  corpus_spec.seed = Rng::mix(cfg.seed, 0xC0B905ULL);
  const LabelledDataset corpus = generate_dataset(rubric, corpus_spec);

  auto search = std::make_shared<CommitmentSearch>(rubric, cfg.options);
  const EvaluatorProfile profile = make_profile(cfg.profile, rubric, cfg.sigma, corpus.xs,
                                                Rng::mix(cfg.seed, 0x9F0F11EULL), cfg.options,
                                                search);

  // The rigged single-challenge cheat needs a commitment that provably fails
  // Challenge 1; datapoints where no such string exists are skipped so the
  // per-round pass probability stays exactly 1/2.
  std::vector<BitString> eligible;
  long skipped = 0;
  if (cfg.profile == "pure_cheat" && search->exhaustive_for(cfg.bits)) {
    for (const auto& x : corpus.xs) {
      if (search->cheat_pool(x)->empty()) {
        ++skipped;
      } else {
        eligible.push_back(x);
      }
    }
  } else {
    eligible = corpus.xs;
  }
  if (eligible.empty()) throw GenerationError("no usable datapoints for the decay study");

  const TotalRubric total = totalize(rubric);
  const Challenge1Options c1{cfg.options.witnesses, cfg.options.symmetric_challenge1};

  std::vector<int> sweep = cfg.rounds_sweep;
  std::sort(sweep.begin(), sweep.end());

  DecayStudy study;
  study.profile = cfg.profile;
  study.rubric_id = rubric.id();

  long total_commitments = 0, pass1_total = 0, pass2_total = 0;
  for (int rounds : sweep) {
    long successes = 0, pass1 = 0, pass2 = 0, commitments = 0;
    Rng pick_rng(Rng::mix(Rng::mix(cfg.seed, 0x91CCULL), static_cast<std::uint64_t>(rounds)));
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const BitString& x = eligible[pick_rng.below(eligible.size())];
      const std::uint64_t session =
          Rng::mix(Rng::mix(cfg.seed, static_cast<std::uint64_t>(rounds)),
                   static_cast<std::uint64_t>(trial));
      Rng generation_rng(Rng::mix(session, StreamTag::generation));
      Rng challenge_rng(Rng::mix(session, StreamTag::challenge));

      bool ok = true;
      for (int round = 1; round <= rounds && ok; ++round) {
        RoundContext ctx{round, generation_rng};
        const std::optional<Commitment> commitment = profile.generate(x, ctx);
        bool ok1 = false, ok2 = false;
        if (commitment) {
          ok1 = challenge1_check(x, commitment->x_prime, total, c1).passed;
          ok2 = challenge2_check(x, commitment->x_prime, rubric, cfg.policy).passed;
          ++commitments;
          pass1 += ok1 ? 1 : 0;
          pass2 += ok2 ? 1 : 0;
        }
        const int drawn = challenge_rng.next_bit();
        ok = drawn == 0 ? ok1 : ok2;
      }
      successes += ok ? 1 : 0;
    }

    DecayPoint p;
    p.rounds = rounds;
    p.success_rate = static_cast<double>(successes) / cfg.trials;
    const double se = std::sqrt(p.success_rate * (1.0 - p.success_rate) / cfg.trials);
    p.ci_low = std::max(0.0, p.success_rate - 1.96 * se);
    p.ci_high = std::min(1.0, p.success_rate + 1.96 * se);
    p.reference_half = std::ldexp(1.0, -rounds);
    p.reference_quarter = lemma_bound(rounds);
    p.challenge1_pass_rate = commitments ? static_cast<double>(pass1) / commitments : 0.0;
    p.challenge2_pass_rate = commitments ? static_cast<double>(pass2) / commitments : 0.0;
    p.skipped_datapoints = skipped;
    study.points.push_back(p);

    total_commitments += commitments;
    pass1_total += pass1;
    pass2_total += pass2;
  }

  const double p1 = total_commitments ? static_cast<double>(pass1_total) / total_commitments : 0.0;
  const double p2 = total_commitments ? static_cast<double>(pass2_total) / total_commitments : 0.0;
  study.luck_rate = std::min(p1, p2);

  study.monotone_decay = true;
  for (std::size_t i = 0; i + 1 < study.points.size(); ++i) {
    const DecayPoint& a = study.points[i];
    const DecayPoint& b = study.points[i + 1];
    const double se_a = (a.ci_high - a.ci_low) / (2 * 1.96);
    const double se_b = (b.ci_high - b.ci_low) / (2 * 1.96);
    if (b.success_rate - a.success_rate > 1.96 * std::sqrt(se_a * se_a + se_b * se_b)) {
      study.monotone_decay = false;
    }
  }

  study.quarter_envelope_valid = study.luck_rate <= 0.5;
  for (const DecayPoint& p : study.points) {
    if (p.reference_quarter > p.ci_high) study.quarter_envelope_valid = false;
  }
  study.caveat =
      "The 4^-r reference assumes the unprepared challenge passes with probability 1/2; the "
      "measured luck rate depends on the corpus and rubric, so 4^-r is only a lower envelope "
      "when the measured luck rate stays at or below 1/2.";
  return study;
}

nlohmann::ordered_json study_to_json(const DecayStudy& study) {
  nlohmann::ordered_json j;
  j["profile"] = study.profile;
  j["rubric"] = study.rubric_id;
  j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : study.points) {
    nlohmann::ordered_json e;
    e["rounds"] = p.rounds;
    e["success_rate"] = p.success_rate;
    e["ci_low"] = p.ci_low;
    e["ci_high"] = p.ci_high;
    e["reference_half"] = p.reference_half;
    e["reference_quarter"] = p.reference_quarter;
    e["challenge1_pass_rate"] = p.challenge1_pass_rate;
    e["challenge2_pass_rate"] = p.challenge2_pass_rate;
    e["skipped_datapoints"] = p.skipped_datapoints;
    j["points"].push_back(std::move(e));
  }
  j["luck_rate"] = study.luck_rate;
  j["monotone_decay"] = study.monotone_decay;
  j["quarter_envelope_valid"] = study.quarter_envelope_valid;
  j["caveat"] = study.caveat;
  return j;
}

}  // namespace nodata
