#include "nodata/rubric_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "nodata/errors.hpp"

namespace nodata {

namespace {

struct RawEntry {
  std::string id;
  bool compound = false;
  std::string spec;
  std::vector<std::string> clauses;
  std::string combiner;
};

CriterionPtr resolve(const std::string& id, const std::map<std::string, RawEntry>& entries,
                     std::map<std::string, CriterionPtr>& resolved,
                     std::set<std::string>& in_progress) {
  if (auto it = resolved.find(id); it != resolved.end()) return it->second;
  auto raw_it = entries.find(id);
  if (raw_it == entries.end()) {
    throw FormatError("compound criterion references missing clause id \"" + id + "\"");
  }
  if (!in_progress.insert(id).second) {
    throw FormatError("criterion \"" + id + "\" participates in a clause cycle");
  }
  const RawEntry& raw = raw_it->second;
  CriterionPtr built;
  if (!raw.compound) {
    built = Criterion::atomic(raw.id, PredicateSpec::parse(raw.spec));
  } else {
    std::vector<CriterionPtr> clauses;
    clauses.reserve(raw.clauses.size());
    for (const auto& cid : raw.clauses) {
      clauses.push_back(resolve(cid, entries, resolved, in_progress));
    }
    built = Criterion::compound(raw.id, combiner_from_name(raw.combiner), std::move(clauses));
  }
  in_progress.erase(id);
  resolved.emplace(id, built);
  return built;
}

}  // namespace

Rubric rubric_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("id") || !j.contains("criteria")) {
    throw FormatError("rubric file must be an object with \"id\" and \"criteria\"");
  }
  const std::string rubric_id = j.at("id").get<std::string>();
  if (!j.at("criteria").is_array()) throw FormatError("\"criteria\" must be an array");

  std::map<std::string, RawEntry> entries;
  std::vector<std::string> file_order;
  std::set<std::string> clause_ids;
  for (const auto& e : j.at("criteria")) {
    RawEntry raw;
    raw.id = e.at("id").get<std::string>();
    const std::string kind = e.at("kind").get<std::string>();
    if (kind == "compound") {
      raw.compound = true;
      if (!e.contains("clauses") || !e.at("clauses").is_array() || e.at("clauses").empty()) {
        throw FormatError("compound criterion \"" + raw.id + "\" needs a non-empty \"clauses\" list");
      }
      for (const auto& cid : e.at("clauses")) raw.clauses.push_back(cid.get<std::string>());
      raw.combiner = e.at("combiner").get<std::string>();
    } else if (kind == "atomic") {
      raw.spec = e.at("spec").get<std::string>();
    } else {
      throw FormatError("criterion \"" + raw.id + "\" has unknown kind \"" + kind + "\"");
    }
    if (entries.count(raw.id)) {
      throw FormatError("duplicate criterion id \"" + raw.id + "\"");
    }
    for (const auto& cid : raw.clauses) clause_ids.insert(cid);
    file_order.push_back(raw.id);
    entries.emplace(raw.id, std::move(raw));
  }

  std::map<std::string, CriterionPtr> resolved;
  std::set<std::string> in_progress;
  std::vector<CriterionPtr> base;
  for (const auto& id : file_order) {
    CriterionPtr c = resolve(id, entries, resolved, in_progress);
    if (!clause_ids.count(id)) base.push_back(c);
  }
  if (base.empty()) throw FormatError("rubric \"" + rubric_id + "\" has no base criteria");
  return Rubric(rubric_id, std::move(base));
}

namespace {

void emit_criterion(const CriterionPtr& c, nlohmann::ordered_json& criteria,
                    std::set<std::string>& emitted) {
  if (emitted.count(c->id())) return;
  if (c->is_compound()) {
    for (const auto& clause : c->clauses()) emit_criterion(clause, criteria, emitted);
    nlohmann::ordered_json e;
    e["id"] = c->id();
    e["kind"] = "compound";
    e["clauses"] = nlohmann::ordered_json::array();
    for (const auto& clause : c->clauses()) e["clauses"].push_back(clause->id());
    e["combiner"] = std::string(combiner_name(c->combiner()));
    criteria.push_back(std::move(e));
  } else {
    nlohmann::ordered_json e;
    e["id"] = c->id();
    e["kind"] = "atomic";
    e["spec"] = c->predicate().text();
    criteria.push_back(std::move(e));
  }
  emitted.insert(c->id());
}

}  // namespace

nlohmann::ordered_json rubric_to_json(const Rubric& rubric) {
  nlohmann::ordered_json j;
  j["id"] = rubric.id();
  j["criteria"] = nlohmann::ordered_json::array();
  std::set<std::string> emitted;
  for (const auto& c : rubric.criteria()) emit_criterion(c, j["criteria"], emitted);
  return j;
}

Rubric load_rubric_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rubric file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("rubric file " + path.string() + ": " + e.what());
  }
  return rubric_from_json(j);
}

std::string_view builtin_rubric_text(std::string_view name) {
  // Clause entries (c1a, c1b) belong to the total rubric only; the base IP
  // rubric is {c0, c1, c2} with c1 the exclusive-or of its clauses.
  static constexpr std::string_view kIp = R"json({
  "id": "ip",
  "criteria": [
    {"id": "c0", "kind": "atomic", "spec": "parity(ones)"},
    {"id": "c1a", "kind": "atomic", "spec": "starts_with(0)"},
    {"id": "c1b", "kind": "atomic", "spec": "contains(10101)"},
    {"id": "c1", "kind": "compound", "clauses": ["c1a", "c1b"], "combiner": "xor"},
    {"id": "c2", "kind": "atomic", "spec": "count_ones_gt(5)"}
  ]
}
)json";
  static constexpr std::string_view kOop = R"json({
  "id": "oop",
  "criteria": [
    {"id": "c0", "kind": "atomic", "spec": "contains(111)"},
    {"id": "c1", "kind": "atomic", "spec": "ends_with(1)"},
    {"id": "c2", "kind": "atomic", "spec": "contains(110001)"}
  ]
}
)json";
  if (name == "ip") return kIp;
  if (name == "oop") return kOop;
  throw ConfigError("unknown built-in rubric \"" + std::string(name) + "\"");
}

Rubric builtin_rubric(std::string_view name) {
  return rubric_from_json(nlohmann::json::parse(builtin_rubric_text(name)));
}

Rubric resolve_rubric(const std::string& name_or_path) {
  if (name_or_path == "ip" || name_or_path == "oop") return builtin_rubric(name_or_path);
  return load_rubric_file(name_or_path);
}

}  // namespace nodata
