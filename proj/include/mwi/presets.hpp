#pragma once
#include <string>
#include <vector>

namespace mwi {

// embedded ready-to-run configurations, one per scenario kind
struct Preset {
    const char* name;
    const char* description;
    const char* text;
};

const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);

} // namespace mwi
