#pragma once

#include "pkns/diagnostics.hpp"

#include <string>
#include <vector>

namespace pkns {

// Shortest decimal form that parses back to the same double ("nan",
// "inf", "-inf" for non-finite values).
std::string format_double(double value);

// Diagnostics table with the fixed column header; one row per record.
std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace pkns
