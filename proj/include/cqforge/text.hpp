#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cqforge {

// Strips surrounding ASCII whitespace.
std::string_view trim(std::string_view s);

std::string to_lower(std::string_view s);

// Splits into lowercased alphanumeric runs; punctuation acts as a delimiter.
std::vector<std::string> tokenize(std::string_view s);

bool starts_with_token(std::string_view s, std::string_view token);

// Replaces every boundary-delimited occurrence of `token` (a char that is not
// a letter or digit ends a token, so "PersonX's" matches "PersonX").
std::string replace_token(std::string_view text, std::string_view token,
                          std::string_view replacement);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Shortest round-trip decimal form of a double ("0.85", not "0.8500000...").
std::string format_double(double v);

// Strict double parser; returns false on trailing garbage or empty input.
bool parse_double(std::string_view s, double& out);

}  // namespace cqforge
