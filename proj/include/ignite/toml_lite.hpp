#pragma once

// Parser for the TOML subset used by experiment configs: [table] and
// [dotted.table] headers, bare or dotted keys, basic strings, integers,
// floats (including inf/nan), booleans, arrays (may span lines) and inline
// tables. Produces a JSON document. Errors are ConfigError with field
// "line <n>".

#include <filesystem>
#include <string_view>

#include <json.hpp>

namespace ignite {

nlohmann::json parse_toml(std::string_view text);

/// Reads a .toml or .json file into a JSON document.
nlohmann::json load_config_document(const std::filesystem::path& path);

}  // namespace ignite
