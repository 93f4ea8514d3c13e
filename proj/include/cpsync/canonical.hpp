#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace cpsync {

using Json = nlohmann::json;

/// Byte-stable serialization: sorted keys, no whitespace, UTF-8 passthrough.
/// nlohmann::json objects are std::map backed, so key order is already sorted.
std::string canonical_dump(const Json& value);

/// Lower-case hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// sha256_hex(canonical_dump(value)).
std::string canonical_hash(const Json& value);

/// Pretty form used for every file this project writes, so outputs diff well
/// and stay byte-identical across runs.
std::string pretty_dump(const Json& value);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace cpsync
