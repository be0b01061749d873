#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "nodata/protocol.hpp"
#include "nodata/rng.hpp"

namespace nodata {

struct RoundContext {
  int round_index = 0;  // 1-based
  Rng& rng;
};

/// A labeller plus a generator. Both are deterministic functions of their
/// inputs and the supplied stream, so profiles can be shared across parallel
/// sessions. A nullopt return signals an adapter failure (only external
/// evaluators produce those; built-ins always answer).
class EvaluatorProfile {
 public:
  using Labeller = std::function<std::optional<int>(const BitString&, Rng&)>;
  using Generator = std::function<std::optional<Commitment>(const BitString&, RoundContext&)>;

  EvaluatorProfile(std::string descriptor, std::string rubric_id, Labeller labeller,
                   Generator generator);

  const std::string& descriptor() const { return descriptor_; }
  /// Rubric this profile was built for; empty means "any". run_no_data
  /// rejects a mismatch before any protocol session starts.
  const std::string& rubric_id() const { return rubric_id_; }

  std::optional<int> label(const BitString& x, Rng& rng) const;
  std::optional<Commitment> generate(const BitString& x, RoundContext& ctx) const;

 private:
  std::string descriptor_;
  std::string rubric_id_;
  Labeller labeller_;
  Generator generator_;
};

/// Search over same-length strings for commitments with a chosen relationship
/// to x under the verifier's checks. For bit lengths where the whole space
/// fits in the sampling budget the space is scanned once per datapoint and
/// cached (a uniform pick from the cached set has the same distribution as
/// rejection sampling's first hit); longer strings fall back to seeded
/// rejection sampling per call.
class CommitmentSearch {
 public:
  static constexpr std::size_t kBudget = 10000;

  CommitmentSearch(Rubric rubric, ProtocolOptions options);

  const Rubric& rubric() const { return rubric_; }
  const TotalRubric& total_rubric() const { return total_; }
  const ProtocolOptions& options() const { return options_; }

  bool exhaustive_for(std::size_t bits) const { return bits <= 13; }

  /// All z != x of the same length that pass both verifier checks against x.
  std::shared_ptr<const std::vector<BitString>> similar_pool(const BitString& x) const;

  /// All z != x with encode(z) == encode(x) but failing Challenge 1: the
  /// commitments a single-challenge cheat needs.
  std::shared_ptr<const std::vector<BitString>> cheat_pool(const BitString& x) const;

  /// All z != x with encode(z) == encode(x) (total structure ignored).
  std::shared_ptr<const std::vector<BitString>> encoding_pool(const BitString& x) const;

  bool passes_both(const BitString& x, const BitString& z) const;

 private:
  enum class PoolKind { similar, cheat, encoding };
  std::shared_ptr<const std::vector<BitString>> pool(const BitString& x, PoolKind kind) const;

  Rubric rubric_;
  TotalRubric total_;
  ProtocolOptions options_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<std::string, int>, std::shared_ptr<const std::vector<BitString>>>
      cache_;
};

using SearchPtr = std::shared_ptr<CommitmentSearch>;

/// Honest evaluator: labels with sigma(C(x)) and commits a distinct similar
/// datapoint when one exists, else x itself. Its commitments pass both
/// challenges, so it succeeds with probability 1.
EvaluatorProfile oracle_profile(const Rubric& rubric, const AggregatorSpec& sigma,
                                const ProtocolOptions& options = {}, SearchPtr search = nullptr);

/// Knows sigma and the encoding but not the total structure: commits some x'
/// with encode(x') == encode(x), searching the corpus first, then same-length
/// strings. Falls back to a random (guaranteed-failable) commitment.
EvaluatorProfile lie1_profile(const Rubric& rubric, const AggregatorSpec& sigma,
                              std::vector<BitString> corpus, SearchPtr search = nullptr);

/// Knows only the label map: commits a corpus datapoint with the same
/// aggregated label, chosen uniformly.
EvaluatorProfile lie2_profile(const Rubric& rubric, const AggregatorSpec& sigma,
                              std::vector<BitString> corpus);

/// Approximately honest generator: per round, delegates to inner with
/// probability 1-p and emits a corrupted commitment (one random bit of x'
/// flipped) with probability p.
EvaluatorProfile lie3_profile(EvaluatorProfile inner, double p);

/// Wraps inner's labeller with independent label flips of probability p;
/// the generator is untouched.
EvaluatorProfile noisy_labeller(EvaluatorProfile inner, double p);

/// Theorem-style coupling: per datapoint, with probability p the label is
/// flipped and generation cheats (label-matched corpus retrieval); otherwise
/// the label is honest and generation is oracular. The per-datapoint coin is
/// derived from (seed, x) so labeller and generator always agree.
EvaluatorProfile coupled_profile(const Rubric& rubric, const AggregatorSpec& sigma, double p,
                                 std::vector<BitString> corpus, std::uint64_t seed,
                                 const ProtocolOptions& options = {}, SearchPtr search = nullptr);

/// Prepared for Challenge 2 only, with zero luck on Challenge 1: commitments
/// match the encoding and provably fail the witness check. Per-round pass
/// probability is exactly 1/2. Used by the soundness-decay studies.
EvaluatorProfile pure_cheat_profile(const Rubric& rubric, const AggregatorSpec& sigma,
                                    const ProtocolOptions& options = {},
                                    SearchPtr search = nullptr);

/// Builds a profile from a CLI-style descriptor: oracle | lie1 | lie2 |
/// lie3:p | noisy:p | coupled:p | pure_cheat | external:command.
EvaluatorProfile make_profile(const std::string& descriptor, const Rubric& rubric,
                              const AggregatorSpec& sigma, const std::vector<BitString>& corpus,
                              std::uint64_t seed, const ProtocolOptions& options = {},
                              SearchPtr search = nullptr);

}  // namespace nodata
