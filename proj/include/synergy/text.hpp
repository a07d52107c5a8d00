#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace synergy::text {

/// Unicode full case folding of a UTF-8 string.
std::string fold_case(std::string_view s);

/// Trims and collapses every run of whitespace into a single ASCII space.
std::string normalize_whitespace(std::string_view s);

/// Lookup key used for molecule names and aliases.
inline std::string name_key(std::string_view s) { return fold_case(normalize_whitespace(s)); }

/// Splits on any code point that is neither a letter, a digit nor a hyphen.
/// Tokens are returned case-folded; empty tokens are dropped.
std::vector<std::string> tokenize(std::string_view s);

}  // namespace synergy::text
