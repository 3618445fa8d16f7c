#pragma once
#include <string>
#include <vector>

#include "mwi/config.hpp"

namespace mwi {

inline constexpr const char* mwisim_version = "mwisim 1.0.0";

struct RunResult {
    std::vector<std::string> outputs;  // files written, CSV first
};

// Execute a resolved scenario and write its output files atomically. Every
// CSV starts with '##' info lines and a '# '-prefixed copy of the canonical
// config, so stripping the comment prefixes reproduces the run exactly.
RunResult run_scenario(const Scenario& s);

// the comment header embedded at the top of every CSV
std::string csv_config_header(const Scenario& s);

} // namespace mwi
