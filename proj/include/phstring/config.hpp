#pragma once

#include <string>

#include "phstring/sim.hpp"

namespace phs {

// Text of the built-in paper-fig1 preset (also shipped under presets/).
const char* paper_fig1_preset_text();

// Parses the TOML-style config format ([section] blocks of key = value
// pairs). Unknown sections or keys are rejected. Throws ParseError with the
// offending line, or ValidationError echoing the violated invariant.
SimConfig parse_config_text(const std::string& text, const std::string& source);
SimConfig parse_config(const std::string& path);

// Applies a "section.key" override with a raw token value; used by the CLI
// flags and the sweep command.
void apply_override(SimConfig& cfg, const std::string& key, const std::string& value);

// Invariant checks shared by the file parser and the CLI override path.
void validate_config(const SimConfig& cfg);

}  // namespace phs
