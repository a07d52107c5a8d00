#pragma once

// Helpers shared by the line-oriented on-disk formats (graph snapshot, PageRank store).

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace synergy::detail {

std::uint64_t fnv1a64(std::string_view bytes);

/// Escapes backslash, tab, CR and LF so a field never breaks the line/column framing.
std::string escape_field(std::string_view s);
std::string unescape_field(std::string_view s);

std::vector<std::string_view> split_tabs(std::string_view line);

/// Writes `body` followed by `CHECKSUM <hex>\n` atomically (temp file + rename).
void write_checksummed(const std::filesystem::path& path, const std::string& body);

/// Reads a file written by write_checksummed. The first line must equal `magic`;
/// a different `MLG`-style header raises FormatVersionMismatch. Returns the body lines
/// after the header, checksum line stripped.
std::vector<std::string> read_checksummed(const std::filesystem::path& path, std::string_view magic);

/// Strict unsigned parse; throws ParseError mentioning `what`.
std::uint64_t parse_u64(std::string_view s, std::string_view what);

}  // namespace synergy::detail
