#pragma once

#include <string>
#include <string_view>

#include "cpsync/canonical.hpp"

namespace cpsync::dzn {

/// Parses MiniZinc data-file text into a JSON object keyed by parameter name.
///
/// Values map as follows: integers and floats to JSON numbers, booleans to
/// JSON booleans, strings to strings, one-dimensional arrays to lists,
/// `[| .. | .. |]` and `arrayNd(...)` to nested lists (row-major), and sets
/// (`{..}` or `a..b`) to sorted lists without duplicates. Enum identifiers are
/// not supported. Throws DznParseError with a line number on bad input.
Json parse(std::string_view text);

/// Renders a JSON value as a MiniZinc literal. Nested lists of depth two use
/// the `[| |]` form; deeper nesting uses `arrayNd` with 1-based index sets.
/// Objects and null are rejected.
std::string render_literal(const Json& value);

/// Renders a JSON object as `name = literal;` lines, in key order.
std::string render_data(const Json& params);

/// Structural equality that treats 4 and 4.0 as equal.
bool values_equal(const Json& a, const Json& b);

}  // namespace cpsync::dzn
