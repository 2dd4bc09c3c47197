#pragma once

#include <set>
#include <string>
#include <string_view>

namespace cqforge {

// Compiled-in English function-word list; the on-disk copy under data/ can
// override it so the filter is tunable without a rebuild.
const std::set<std::string>& builtin_stopwords();

// One lowercase token per line; '#' comments and blank lines are ignored.
std::set<std::string> load_stopwords(const std::string& path);

// Lowercased alphanumeric tokens minus stopwords and the placeholder person
// tokens (personx / persony / personz). This is the unit of keyword overlap.
std::set<std::string> content_tokens(std::string_view text,
                                     const std::set<std::string>& stopwords);

}  // namespace cqforge
