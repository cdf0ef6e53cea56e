#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace t3f::text {

// Shortest representation that parses back to the same double.
std::string format_double(double x);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::string_view trim(std::string_view s);

// Splits on runs of spaces/tabs.
std::vector<std::string_view> split_ws(std::string_view s);

// Splits on a single delimiter; empty fields are kept.
std::vector<std::string_view> split(std::string_view s, char delim);

}  // namespace t3f::text
