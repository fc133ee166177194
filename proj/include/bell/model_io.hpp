#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "bell/model.hpp"

namespace bell {

/// JSON form of a model (schema in docs/model_format.md).
nlohmann::json model_to_json(const ContextualModel& model);

/// Structural parse. Unknown fields, wrong JSON types and malformed rational
/// strings throw ParseError; semantic problems (pmf sums, outcome values,
/// dimensions) are left for validate_model to report.
ContextualModel model_from_json(const nlohmann::json& doc);

/// Canonical compact serialization: keys sorted, no whitespace.
std::string serialize_model(const ContextualModel& model);
ContextualModel parse_model(std::string_view text);
ContextualModel load_model(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of serialize_model(model).
std::string model_hash(const ContextualModel& model);
std::string sha256_hex(std::string_view bytes);

/// {"value": "a/b", "decimal": "..."} rendering used by every report.
nlohmann::json rational_json(const Rational& value);

/// Reads a whole file; throws Error when unreadable.
std::string read_file(const std::filesystem::path& path);

}  // namespace bell
