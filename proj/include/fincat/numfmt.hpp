#pragma once

#include <string>
#include <string_view>

namespace fincat {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Full-string parse; false on trailing junk, empty input or out of range.
bool parse_double(std::string_view text, double& out);

}  // namespace fincat
