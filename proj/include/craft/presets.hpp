#pragma once

#include <string>
#include <vector>

#include "craft/types.hpp"

namespace craft::presets {

std::vector<std::string> preset_names();

// Named task presets. Unknown names raise a configuration error listing the
// valid presets.
TaskSpec get(const std::string& name);

}  // namespace craft::presets
