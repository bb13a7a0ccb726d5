#pragma once

// Model documents (JSON) and their canonical serialization.
//
// Canonical form: object keys sorted, reals printed with 17 significant
// digits, integers only for attribute indices and edge endpoints, scalar
// arrays kept on one line. Distributions identical across every decision
// are written once under the "*" decision key.

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "deun/model.hpp"

namespace deun {

struct ParsedModel {
  DecisionModel model;
  ValidationReport report;  // document problems followed by validate_model
};

/// Parses without throwing on validation problems. ParseError for malformed
/// JSON, with line and column.
ParsedModel read_model_document(std::string_view text, std::string_view source = "<input>");

/// Fully validated model; ModelValidationError carries the complete report.
DecisionModel parse_model_text(std::string_view text, std::string_view source = "<input>");
/// Io when the file cannot be read.
DecisionModel parse_model(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

nlohmann::json model_to_json(const DecisionModel& model);
std::string serialize_model(const DecisionModel& model);

/// Canonical text of any JSON value; a trailing newline is appended.
std::string canonical_dump(const nlohmann::json& value);

/// %.17g, rejecting non-finite values.
std::string format_real(double v);

}  // namespace deun
