#include "nodata/criteria.hpp"

#include <charconv>

#include "nodata/errors.hpp"

namespace nodata {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

PredicateSpec PredicateSpec::parse(std::string_view text) {
  const std::string_view t = trim(text);
  const std::size_t open = t.find('(');
  if (open == std::string_view::npos || t.back() != ')') {
    throw FormatError("malformed predicate \"" + std::string(text) + "\"");
  }
  const std::string_view name = trim(t.substr(0, open));
  const std::string_view arg = trim(t.substr(open + 1, t.size() - open - 2));

  PredicateSpec spec;
  if (name == "parity") {
    if (arg != "ones") throw FormatError("parity() only supports the form parity(ones)");
    spec.kind = PredicateKind::even_ones;
    return spec;
  }
  if (name == "starts_with" || name == "ends_with" || name == "contains") {
    spec.kind = name == "starts_with" ? PredicateKind::starts_with
              : name == "ends_with"   ? PredicateKind::ends_with
                                      : PredicateKind::contains;
    spec.pattern = BitString::parse(arg);
    return spec;
  }
  if (name == "count_ones_gt") {
    spec.kind = PredicateKind::count_ones_gt;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), spec.threshold);
    if (ec != std::errc{} || ptr != arg.data() + arg.size()) {
      throw FormatError("count_ones_gt expects an integer, got \"" + std::string(arg) + "\"");
    }
    return spec;
  }
  throw FormatError("unknown predicate \"" + std::string(name) + "\"");
}

std::string PredicateSpec::text() const {
  switch (kind) {
    case PredicateKind::even_ones:
      return "parity(ones)";
    case PredicateKind::starts_with:
      return "starts_with(" + pattern.str() + ")";
    case PredicateKind::ends_with:
      return "ends_with(" + pattern.str() + ")";
    case PredicateKind::contains:
      return "contains(" + pattern.str() + ")";
    case PredicateKind::count_ones_gt:
      return "count_ones_gt(" + std::to_string(threshold) + ")";
  }
  throw Error("unreachable predicate kind");
}

int PredicateSpec::eval(const BitString& s) const {
  switch (kind) {
    case PredicateKind::even_ones:
      return s.popcount() % 2 == 0 ? 1 : 0;
    case PredicateKind::starts_with:
      return s.starts_with(pattern) ? 1 : 0;
    case PredicateKind::ends_with:
      return s.ends_with(pattern) ? 1 : 0;
    case PredicateKind::contains:
      return s.contains(pattern) ? 1 : 0;
    case PredicateKind::count_ones_gt:
      return static_cast<long long>(s.popcount()) > threshold ? 1 : 0;
  }
  throw Error("unreachable predicate kind");
}

Combiner combiner_from_name(std::string_view name) {
  if (name == "xor") return Combiner::xor_op;
  if (name == "and") return Combiner::and_op;
  if (name == "or") return Combiner::or_op;
  throw FormatError("unknown combiner \"" + std::string(name) + "\"");
}

std::string_view combiner_name(Combiner c) {
  switch (c) {
    case Combiner::xor_op: return "xor";
    case Combiner::and_op: return "and";
    case Combiner::or_op: return "or";
  }
  throw Error("unreachable combiner");
}

std::shared_ptr<const Criterion> Criterion::atomic(std::string id, PredicateSpec spec) {
  auto c = std::shared_ptr<Criterion>(new Criterion());
  c->id_ = std::move(id);
  c->spec_ = std::move(spec);
  return c;
}

std::shared_ptr<const Criterion> Criterion::compound(
    std::string id, Combiner combiner,
    std::vector<std::shared_ptr<const Criterion>> clauses) {
  if (clauses.empty()) {
    throw ConfigError("compound criterion \"" + id + "\" needs at least one clause");
  }
  for (const auto& cl : clauses) {
    if (!cl) throw ConfigError("compound criterion \"" + id + "\" has a null clause");
  }
  auto c = std::shared_ptr<Criterion>(new Criterion());
  c->id_ = std::move(id);
  c->compound_ = true;
  c->combiner_ = combiner;
  c->clauses_ = std::move(clauses);
  return c;
}

const PredicateSpec& Criterion::predicate() const {
  if (compound_) throw ConfigError("criterion \"" + id_ + "\" is compound, no predicate");
  return spec_;
}

Combiner Criterion::combiner() const {
  if (!compound_) throw ConfigError("criterion \"" + id_ + "\" is atomic, no combiner");
  return combiner_;
}

int Criterion::evaluate(const BitString& s) const {
  if (!compound_) return spec_.eval(s);
  switch (combiner_) {
    case Combiner::xor_op: {
      int acc = 0;
      for (const auto& cl : clauses_) acc ^= cl->evaluate(s);
      return acc;
    }
    case Combiner::and_op:
      for (const auto& cl : clauses_) {
        if (cl->evaluate(s) == 0) return 0;
      }
      return 1;
    case Combiner::or_op:
      for (const auto& cl : clauses_) {
        if (cl->evaluate(s) == 1) return 1;
      }
      return 0;
  }
  throw Error("unreachable combiner");
}

void Criterion::collect_witnesses(const BitString& x, PatternWitnessMode mode,
                                  std::set<BitString>& out) const {
  if (compound_) {
    for (const auto& cl : clauses_) cl->collect_witnesses(x, mode, out);
    return;
  }
  switch (spec_.kind) {
    case PredicateKind::even_ones:
    case PredicateKind::count_ones_gt:
      out.insert(x);
      return;
    case PredicateKind::starts_with:
      out.insert(x.prefix(spec_.pattern.size()));
      return;
    case PredicateKind::ends_with:
      out.insert(x.suffix(spec_.pattern.size()));
      return;
    case PredicateKind::contains: {
      const std::size_t plen = spec_.pattern.size();
      if (mode == PatternWitnessMode::off || x.size() < plen) return;
      if (mode == PatternWitnessMode::matching_only) {
        if (x.contains(spec_.pattern)) out.insert(spec_.pattern);
        return;
      }
      for (std::size_t pos = 0; pos + plen <= x.size(); ++pos) {
        out.insert(x.window(pos, plen));
      }
      return;
    }
  }
}

std::set<BitString> Criterion::witnesses(const BitString& x, PatternWitnessMode mode) const {
  std::set<BitString> out;
  collect_witnesses(x, mode, out);
  if (out.empty()) out.insert(x);
  return out;
}

}  // namespace nodata
