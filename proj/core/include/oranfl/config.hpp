#pragma once

#include <filesystem>
#include <string>

#include "oranfl/sim.hpp"

namespace oranfl {

// Parses the flat structured-text experiment format ([sim]/[controller]/[fl]
// sections plus repeated [rat]/[client]/[pathway] blocks) into a validated
// SimConfig. Unknown keys and sections are errors; every invariant violation
// is reported with its key path and line number.
SimConfig parse_config(const std::filesystem::path& path);

// Parses from an in-memory string; `name` is used in error messages.
SimConfig parse_config_text(const std::string& text, const std::string& name = "<string>");

// Canonical text form; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const SimConfig& cfg);

}  // namespace oranfl
