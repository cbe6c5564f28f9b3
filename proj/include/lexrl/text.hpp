#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lexrl {

/// Shortest round-trip-safe decimal rendering (printf %.17g).
std::string format_double(double value);

std::string_view trim(std::string_view text);

/// Splits on `sep`, trimming each piece; empty pieces are kept.
std::vector<std::string> split(std::string_view text, char sep);

/// strtod with full-consumption check; throws std::invalid_argument with
/// `context` on failure.
double parse_double(std::string_view text, const std::string& context);
long long parse_int(std::string_view text, const std::string& context);

}  // namespace lexrl
