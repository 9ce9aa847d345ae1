#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

namespace orl::detail {

/// Parses the TOML subset used by pipeline configs into a JSON tree:
/// comments, [table] and [a.b] headers, [[array-of-tables]], and
/// key = value with strings, integers, floats, booleans and (possibly
/// multi-line) arrays of those. Throws ValidationError naming `source`
/// and the line on anything else.
nlohmann::ordered_json parse_toml(std::string_view text, const std::string& source);

}  // namespace orl::detail
