#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gfs {

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// Fixed-point rendering for human-facing tables.
std::string format_fixed(double value, int digits);

// Strict double parse of a whole token; returns false on any trailing junk.
bool parse_double(std::string_view token, double& out);

std::vector<std::string_view> split_whitespace(std::string_view line);
std::vector<std::string_view> split_char(std::string_view line, char sep);
std::string_view trim(std::string_view s);

std::string join(std::span<const std::string> parts, std::string_view sep);

}  // namespace gfs
