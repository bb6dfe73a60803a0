#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "chaintransport/sweep_io.hpp"

namespace chaintransport {

// Named run configurations that regenerate the standard figure set. Each part
// is a complete config including "command"; multi-part presets write one CSV
// per part. Sink coupling is pinned to 2 Omega.
struct PresetPart {
    std::string part;  // empty for single-part presets
    Config config;
};

const std::vector<std::string>& preset_names();

/// Throws Error(invalid_argument) for unknown names.
std::vector<PresetPart> preset(std::string_view name);

} // namespace chaintransport
