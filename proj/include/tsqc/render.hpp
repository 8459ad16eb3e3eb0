#pragma once

// Output formats for the command-line tool: json, csv and text.

#include <string>

#include "json.hpp"
#include "tsqc/counterfactual.hpp"
#include "tsqc/scenarios.hpp"
#include "tsqc/verify.hpp"

namespace tsqc::render {

enum class Format { Json, Csv, Text };

/// Parses "json", "csv" or "text"; anything else is InvalidArgument.
Format parse_format(const std::string& name);

nlohmann::json to_json(const ScenarioReport& report);
nlohmann::json to_json(const VerifyReport& report);

std::string scenario(const ScenarioReport& report, Format format);
std::string verdict(const CounterfactualStatement& statement, const Verdict& v, Format format);
std::string verification(const VerifyReport& report, Format format);
std::string catalogue(Format format);

}  // namespace tsqc::render
