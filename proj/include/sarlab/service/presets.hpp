#pragma once

#include <string>

#include "sarlab/config.hpp"

namespace sarlab::service {

/// Named pipeline configurations: fig5a..fig5d (linear array at 435 GHz,
/// 128 or 256 elements at lambda/4, 5 or 10 GHz) and cylindrical-knife.
/// Each entry is {"id", "title", "type", "config"}.
Json presets();

/// Config of the preset `id`; throws ValidationError for unknown ids.
Json preset_config(const std::string& id);

}  // namespace sarlab::service
