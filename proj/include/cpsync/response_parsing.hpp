#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cpsync/canonical.hpp"

namespace cpsync::parsing {

/// Body of the first ``` fenced block; the fence's language tag is ignored.
std::optional<std::string> first_code_block(std::string_view text);

/// First JSON object found in the text: the whole text, else a fenced block,
/// else the first balanced `{...}` span that parses.
std::optional<Json> first_json_object(std::string_view text);

/// `<taskN>...</taskN>` spans ordered by N ascending.
std::vector<std::pair<int, std::string>> tagged_tasks(std::string_view text);

/// True when `source` has a top-level `def name(a, b)` with exactly
/// `arity` positional parameters.
bool defines_function(std::string_view source, std::string_view name, int arity);

}  // namespace cpsync::parsing
