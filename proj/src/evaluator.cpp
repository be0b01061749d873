#include "nodata/evaluator.hpp"

#include <sstream>
#include <unordered_map>

#include "nodata/errors.hpp"
#include "nodata/external.hpp"

namespace nodata {

EvaluatorProfile::EvaluatorProfile(std::string descriptor, std::string rubric_id,
                                   Labeller labeller, Generator generator)
    : descriptor_(std::move(descriptor)),
      rubric_id_(std::move(rubric_id)),
      labeller_(std::move(labeller)),
      generator_(std::move(generator)) {
  if (!labeller_ || !generator_) {
    throw ConfigError("evaluator profile \"" + descriptor_ + "\" is missing a labeller or generator");
  }
}

std::optional<int> EvaluatorProfile::label(const BitString& x, Rng& rng) const {
  return labeller_(x, rng);
}

std::optional<Commitment> EvaluatorProfile::generate(const BitString& x, RoundContext& ctx) const {
  return generator_(x, ctx);
}

CommitmentSearch::CommitmentSearch(Rubric rubric, ProtocolOptions options)
    : rubric_(std::move(rubric)), total_(totalize(rubric_)), options_(options) {}

bool CommitmentSearch::passes_both(const BitString& x, const BitString& z) const {
  if (encode(rubric_, z) != encode(rubric_, x)) return false;
  const Challenge1Options c1{options_.witnesses, options_.symmetric_challenge1};
  return challenge1_check(x, z, total_, c1).passed;
}

std::shared_ptr<const std::vector<BitString>> CommitmentSearch::pool(const BitString& x,
                                                                     PoolKind kind) const {
  const auto key = std::make_pair(x.str(), static_cast<int>(kind));
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  if (!exhaustive_for(x.size())) {
    throw ConfigError("exhaustive commitment search is limited to short strings");
  }

  const std::size_t n = x.size();
  const Challenge1Options c1{options_.witnesses, options_.symmetric_challenge1};
  const BitString ex = encode(rubric_, x);
  auto result = std::make_shared<std::vector<BitString>>();
  for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
    BitString z = BitString::from_value(v, n);
    if (z == x) continue;
    if (encode(rubric_, z) != ex) continue;
    if (kind == PoolKind::encoding) {
      result->push_back(std::move(z));
      continue;
    }
    const bool ok1 = challenge1_check(x, z, total_, c1).passed;
    if ((kind == PoolKind::similar && ok1) || (kind == PoolKind::cheat && !ok1)) {
      result->push_back(std::move(z));
    }
  }

  std::lock_guard lock(mu_);
  auto [it, _] = cache_.emplace(key, std::move(result));
  return it->second;
}

std::shared_ptr<const std::vector<BitString>> CommitmentSearch::similar_pool(
    const BitString& x) const {
  return pool(x, PoolKind::similar);
}

std::shared_ptr<const std::vector<BitString>> CommitmentSearch::cheat_pool(
    const BitString& x) const {
  return pool(x, PoolKind::cheat);
}

std::shared_ptr<const std::vector<BitString>> CommitmentSearch::encoding_pool(
    const BitString& x) const {
  return pool(x, PoolKind::encoding);
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

EvaluatorProfile::Labeller truthful_labeller(const Rubric& rubric, const AggregatorSpec& sigma) {
  return [rubric, sigma](const BitString& x, Rng&) -> std::optional<int> {
    return aggregate(sigma, encode(rubric, x));
  };
}

SearchPtr ensure_search(SearchPtr search, const Rubric& rubric, const ProtocolOptions& options) {
  if (search) return search;
  return std::make_shared<CommitmentSearch>(rubric, options);
}

/// Uniform pick among corpus entries grouped under key, excluding x.
std::optional<BitString> pick_from(const std::vector<BitString>& pool, const BitString& x,
                                   Rng& rng) {
  std::size_t usable = pool.size();
  for (const auto& z : pool) {
    if (z == x) --usable;
  }
  if (usable == 0) return std::nullopt;
  std::uint64_t k = rng.below(usable);
  for (const auto& z : pool) {
    if (z == x) continue;
    if (k == 0) return z;
    --k;
  }
  return std::nullopt;  // unreachable
}

}  // namespace

EvaluatorProfile oracle_profile(const Rubric& rubric, const AggregatorSpec& sigma,
                                const ProtocolOptions& options, SearchPtr search) {
  search = ensure_search(std::move(search), rubric, options);
  auto generator = [rubric, sigma, search](const BitString& x,
                                           RoundContext& ctx) -> std::optional<Commitment> {
    BitString xp = x;
    if (search->exhaustive_for(x.size())) {
      auto pool = search->similar_pool(x);
      if (!pool->empty()) xp = (*pool)[ctx.rng.below(pool->size())];
    } else {
      for (std::size_t i = 0; i < CommitmentSearch::kBudget; ++i) {
        BitString z = BitString::random(ctx.rng, x.size());
        if (z != x && search->passes_both(x, z)) {
          xp = std::move(z);
          break;
        }
      }
    }
    return Commitment{xp, aggregate(sigma, encode(rubric, xp))};
  };
  return EvaluatorProfile("oracle", rubric.id(), truthful_labeller(rubric, sigma),
                          std::move(generator));
}

EvaluatorProfile lie1_profile(const Rubric& rubric, const AggregatorSpec& sigma,
                              std::vector<BitString> corpus, SearchPtr search) {
  if (corpus.empty()) throw ConfigError("lie1 profile needs a non-empty corpus");
  search = ensure_search(std::move(search), rubric, ProtocolOptions{});

  auto by_encoding = std::make_shared<std::unordered_map<std::string, std::vector<BitString>>>();
  for (const auto& z : corpus) {
    (*by_encoding)[encode(rubric, z).str()].push_back(z);
  }

  auto generator = [rubric, sigma, search, by_encoding](
                       const BitString& x, RoundContext& ctx) -> std::optional<Commitment> {
    const BitString ex = encode(rubric, x);
    std::optional<BitString> xp;
    if (auto it = by_encoding->find(ex.str()); it != by_encoding->end()) {
      xp = pick_from(it->second, x, ctx.rng);
    }
    if (!xp && search->exhaustive_for(x.size())) {
      auto pool = search->encoding_pool(x);
      if (!pool->empty()) xp = (*pool)[ctx.rng.below(pool->size())];
    } else if (!xp) {
      for (std::size_t i = 0; i < CommitmentSearch::kBudget; ++i) {
        BitString z = BitString::random(ctx.rng, x.size());
        if (z != x && encode(rubric, z) == ex) {
          xp = std::move(z);
          break;
        }
      }
    }
    // No encoding match within the search budget: commit a random string.
    if (!xp) xp = BitString::random(ctx.rng, x.size());
    return Commitment{*xp, aggregate(sigma, encode(rubric, *xp))};
  };
  return EvaluatorProfile("lie1", rubric.id(), truthful_labeller(rubric, sigma),
                          std::move(generator));
}

EvaluatorProfile lie2_profile(const Rubric& rubric, const AggregatorSpec& sigma,
                              std::vector<BitString> corpus) {
  if (corpus.empty()) throw ConfigError("lie2 profile needs a non-empty corpus");

  auto by_label = std::make_shared<std::map<int, std::vector<BitString>>>();
  for (const auto& z : corpus) {
    (*by_label)[aggregate(sigma, encode(rubric, z))].push_back(z);
  }

  auto generator = [rubric, sigma, by_label](const BitString& x,
                                             RoundContext& ctx) -> std::optional<Commitment> {
    const int y = aggregate(sigma, encode(rubric, x));
    std::optional<BitString> xp;
    if (auto it = by_label->find(y); it != by_label->end()) {
      xp = pick_from(it->second, x, ctx.rng);
    }
    if (!xp) xp = BitString::random(ctx.rng, x.size());
    return Commitment{*xp, aggregate(sigma, encode(rubric, *xp))};
  };
  return EvaluatorProfile("lie2", rubric.id(), truthful_labeller(rubric, sigma),
                          std::move(generator));
}

EvaluatorProfile lie3_profile(EvaluatorProfile inner, double p) {
  if (p < 0.0 || p > 1.0) throw ConfigError("lie3 probability must be in [0, 1]");
  const std::string descriptor = "lie3:" + fmt(p) + "(" + inner.descriptor() + ")";
  auto shared_inner = std::make_shared<EvaluatorProfile>(std::move(inner));

  auto labeller = [shared_inner](const BitString& x, Rng& rng) {
    return shared_inner->label(x, rng);
  };
  auto generator = [shared_inner, p](const BitString& x,
                                     RoundContext& ctx) -> std::optional<Commitment> {
    const bool corrupt = ctx.rng.bernoulli(p);
    std::optional<Commitment> c = shared_inner->generate(x, ctx);
    if (!c) return c;
    if (corrupt && !c->x_prime.empty()) {
      c->x_prime.flip_bit(ctx.rng.below(c->x_prime.size()));
    }
    return c;
  };
  return EvaluatorProfile(descriptor, shared_inner->rubric_id(), std::move(labeller),
                          std::move(generator));
}

EvaluatorProfile noisy_labeller(EvaluatorProfile inner, double p) {
  if (p < 0.0 || p > 1.0) throw ConfigError("noise probability must be in [0, 1]");
  const std::string descriptor = "noisy:" + fmt(p) + "(" + inner.descriptor() + ")";
  auto shared_inner = std::make_shared<EvaluatorProfile>(std::move(inner));

  auto labeller = [shared_inner, p](const BitString& x, Rng& rng) -> std::optional<int> {
    std::optional<int> y = shared_inner->label(x, rng);
    if (!y) return y;
    if (rng.bernoulli(p)) return 1 - *y;
    return y;
  };
  auto generator = [shared_inner](const BitString& x, RoundContext& ctx) {
    return shared_inner->generate(x, ctx);
  };
  return EvaluatorProfile(descriptor, shared_inner->rubric_id(), std::move(labeller),
                          std::move(generator));
}

EvaluatorProfile coupled_profile(const Rubric& rubric, const AggregatorSpec& sigma, double p,
                                 std::vector<BitString> corpus, std::uint64_t seed,
                                 const ProtocolOptions& options, SearchPtr search) {
  if (p < 0.0 || p > 1.0) throw ConfigError("coupling probability must be in [0, 1]");
  if (corpus.empty()) throw ConfigError("coupled profile needs a non-empty corpus");
  search = ensure_search(std::move(search), rubric, options);

  auto by_label = std::make_shared<std::map<int, std::vector<BitString>>>();
  for (const auto& z : corpus) {
    (*by_label)[aggregate(sigma, encode(rubric, z))].push_back(z);
  }

  // The lie/mislabel coin is a function of (seed, x): consistent between the
  // labeller and every round's generation, independent across datapoints.
  auto lies_on = [seed, p](const BitString& x) {
    Rng coin(Rng::mix(seed, stable_hash(x)));
    return coin.bernoulli(p);
  };

  auto labeller = [rubric, sigma, lies_on](const BitString& x, Rng&) -> std::optional<int> {
    const int y = aggregate(sigma, encode(rubric, x));
    return lies_on(x) ? 1 - y : y;
  };
  auto generator = [rubric, sigma, search, by_label, lies_on](
                       const BitString& x, RoundContext& ctx) -> std::optional<Commitment> {
    const int y = aggregate(sigma, encode(rubric, x));
    if (!lies_on(x)) {
      BitString xp = x;
      if (search->exhaustive_for(x.size())) {
        auto pool = search->similar_pool(x);
        if (!pool->empty()) xp = (*pool)[ctx.rng.below(pool->size())];
      } else {
        for (std::size_t i = 0; i < CommitmentSearch::kBudget; ++i) {
          BitString z = BitString::random(ctx.rng, x.size());
          if (z != x && search->passes_both(x, z)) {
            xp = std::move(z);
            break;
          }
        }
      }
      return Commitment{xp, y};
    }
    const int claimed = 1 - y;
    std::optional<BitString> xp;
    if (auto it = by_label->find(claimed); it != by_label->end()) {
      xp = pick_from(it->second, x, ctx.rng);
    }
    if (!xp) xp = BitString::random(ctx.rng, x.size());
    return Commitment{*xp, claimed};
  };
  return EvaluatorProfile("coupled:" + fmt(p), rubric.id(), std::move(labeller),
                          std::move(generator));
}

EvaluatorProfile pure_cheat_profile(const Rubric& rubric, const AggregatorSpec& sigma,
                                    const ProtocolOptions& options, SearchPtr search) {
  search = ensure_search(std::move(search), rubric, options);

  auto generator = [rubric, sigma, search](const BitString& x,
                                           RoundContext& ctx) -> std::optional<Commitment> {
    std::optional<BitString> xp;
    if (search->exhaustive_for(x.size())) {
      auto pool = search->cheat_pool(x);
      if (!pool->empty()) xp = (*pool)[ctx.rng.below(pool->size())];
    } else {
      const BitString ex = encode(rubric, x);
      const Challenge1Options c1{search->options().witnesses,
                                 search->options().symmetric_challenge1};
      for (std::size_t i = 0; i < CommitmentSearch::kBudget; ++i) {
        BitString z = BitString::random(ctx.rng, x.size());
        if (z == x || encode(rubric, z) != ex) continue;
        if (!challenge1_check(x, z, search->total_rubric(), c1).passed) {
          xp = std::move(z);
          break;
        }
      }
    }
    if (!xp) xp = BitString::random(ctx.rng, x.size());
    return Commitment{*xp, aggregate(sigma, encode(rubric, *xp))};
  };
  return EvaluatorProfile("pure_cheat", rubric.id(), truthful_labeller(rubric, sigma),
                          std::move(generator));
}

EvaluatorProfile make_profile(const std::string& descriptor, const Rubric& rubric,
                              const AggregatorSpec& sigma, const std::vector<BitString>& corpus,
                              std::uint64_t seed, const ProtocolOptions& options,
                              SearchPtr search) {
  const auto parse_param = [&descriptor](std::string_view prefix) {
    const std::string text = descriptor.substr(prefix.size());
    try {
      std::size_t used = 0;
      const double p = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return p;
    } catch (const std::exception&) {
      throw ConfigError("bad parameter in evaluator descriptor \"" + descriptor + "\"");
    }
  };

  if (descriptor == "oracle") return oracle_profile(rubric, sigma, options, search);
  if (descriptor == "lie1") return lie1_profile(rubric, sigma, corpus, search);
  if (descriptor == "lie2") return lie2_profile(rubric, sigma, corpus);
  if (descriptor == "pure_cheat") return pure_cheat_profile(rubric, sigma, options, search);
  if (descriptor.starts_with("lie3:")) {
    return lie3_profile(oracle_profile(rubric, sigma, options, search), parse_param("lie3:"));
  }
  if (descriptor.starts_with("noisy:")) {
    return noisy_labeller(oracle_profile(rubric, sigma, options, search), parse_param("noisy:"));
  }
  if (descriptor.starts_with("coupled:")) {
    return coupled_profile(rubric, sigma, parse_param("coupled:"), corpus, seed, options, search);
  }
  if (descriptor.starts_with("external:")) {
    return external_profile(descriptor.substr(std::string("external:").size()));
  }
  throw ConfigError("unknown evaluator descriptor \"" + descriptor + "\"");
}

}  // namespace nodata
