#pragma once
#include <string>

namespace mwi {

// shortest decimal form that round-trips to the same double
std::string format_double(double x);

// write-to-temp then rename, so readers never observe partial files
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

} // namespace mwi
