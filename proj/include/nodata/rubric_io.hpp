#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "nodata/rubric.hpp"

namespace nodata {

/// Parses a rubric definition. Schema:
///   {"id": str, "criteria": [{"id": str, "kind": "atomic"|"compound",
///     "spec": <predicate>, "clauses": [ids], "combiner": "xor"|"and"|"or"}]}
/// Entries referenced in another entry's "clauses" list exist for
/// totalization only; the base rubric is the remaining entries in file order.
Rubric rubric_from_json(const nlohmann::json& j);

nlohmann::ordered_json rubric_to_json(const Rubric& rubric);

Rubric load_rubric_file(const std::filesystem::path& path);

/// Built-in rubric source ("ip" or "oop"); identical to the shipped data
/// files byte-for-byte.
std::string_view builtin_rubric_text(std::string_view name);

Rubric builtin_rubric(std::string_view name);

/// Resolves "--rubric" values: a built-in name or a path to a rubric file.
Rubric resolve_rubric(const std::string& name_or_path);

}  // namespace nodata
