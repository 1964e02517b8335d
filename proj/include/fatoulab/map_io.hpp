#pragma once

#include <string>

#include <json.hpp>

#include "fatoulab/mapcore.hpp"

namespace fatoulab {

using Json = nlohmann::json;

/// Complex scalar from [re, im] or a bare number. `where` is a JSON pointer
/// used in error messages.
Complex complex_from_json(const Json& j, const std::string& where);
Json complex_to_json(Complex z);

/// Recursive node schema {"op": ..., per-op fields}. ParseError messages carry
/// the JSON pointer of the offending node.
MapExpr map_from_json(const Json& j, const std::string& where = "");
Json map_to_json(const MapExpr& e);

/// Complex literal: "2", "-1.5", "3i", "1+2i", "-i", "1e-3-2e-3i".
Complex parse_complex_literal(const std::string& text);

/// Map spec from the command line or a config value:
///   JSON object text (starts with '{'), "@path" (JSON file), or an inline
///   mini-spec:
///     var | const:c | poly:c0,c1,... | affine:scale,shift | mobius:a,b,c,d
///     | blaschke:a | exp:<spec> | pow:k:<spec>
MapExpr parse_map_spec(const std::string& text);

}  // namespace fatoulab
