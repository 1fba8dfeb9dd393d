#pragma once

#include <string>

#include "json.hpp"

namespace phaselab {

// Minimal TOML subset sufficient for experiment configs: [section] and
// [a.b] tables, key = value with strings, integers, floats, booleans, and
// flat arrays, plus # comments. Anything else is rejected with a message.
nlohmann::json parse_toml_lite(const std::string& text);

// Dispatches on content: documents starting with '{' parse as JSON,
// everything else as the TOML subset.
nlohmann::json load_config_file(const std::string& path);

} // namespace phaselab
