#pragma once

#include <filesystem>
#include <string>

#include "geogami/config.hpp"

namespace geogami::testing {

inline std::filesystem::path source_dir() { return GEOGAMI_SOURCE_DIR; }

inline config::RunConfig preset(const std::string& name) {
  return config::load_config(source_dir() / "presets" / (name + ".json"));
}

inline config::Simulation table1(
    std::optional<locomotion::ActuationMode> mode = {},
    std::optional<bool> origami = {}) {
  return config::build_simulation(preset("paper-table1"), mode, origami);
}

}  // namespace geogami::testing
