#include "codec_util.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "synergy/error.hpp"

namespace synergy::detail {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string escape_field(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string unescape_field(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out.push_back(s[i]);
            continue;
        }
        if (++i == s.size()) throw ParseError("dangling escape");
        switch (s[i]) {
            case '\\': out.push_back('\\'); break;
            case 't': out.push_back('\t'); break;
            case 'n': out.push_back('\n'); break;
            case 'r': out.push_back('\r'); break;
            default: throw ParseError(std::string("bad escape \\") + s[i]);
        }
    }
    return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find('\t', start);
        if (pos == std::string_view::npos) {
            parts.push_back(line.substr(start));
            return parts;
        }
        parts.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

void write_checksummed(const std::filesystem::path& path, const std::string& body) {
    char trailer[40];
    std::snprintf(trailer, sizeof trailer, "CHECKSUM %016llx\n",
                  static_cast<unsigned long long>(fnv1a64(body)));
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + tmp.string() + " for writing");
        out << body << trailer;
        out.flush();
        if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "rename to " + path.string() + ": " + ec.message());
}

std::vector<std::string> read_checksummed(const std::filesystem::path& path, std::string_view magic) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed: " + path.string());
    const std::string data = ss.str();

    const auto first_nl = data.find('\n');
    const std::string_view header =
        std::string_view(data).substr(0, first_nl == std::string::npos ? data.size() : first_nl);
    if (header != magic) {
        throw Error(ErrorCode::FormatVersionMismatch,
                    path.string() + ": expected header " + std::string(magic) + ", found '" +
                        std::string(header.substr(0, 16)) + "'");
    }

    // The checksum line is the last line of the file and covers every byte before it.
    const std::string_view tag = "CHECKSUM ";
    if (data.empty() || data.back() != '\n')
        throw Error(ErrorCode::ChecksumMismatch, path.string() + ": truncated");
    const auto last_start = data.rfind('\n', data.size() - 2);
    const std::size_t trailer_pos = last_start == std::string::npos ? 0 : last_start + 1;
    const std::string_view trailer =
        std::string_view(data).substr(trailer_pos, data.size() - 1 - trailer_pos);
    if (trailer.substr(0, tag.size()) != tag || trailer_pos <= first_nl)
        throw Error(ErrorCode::ChecksumMismatch, path.string() + ": missing checksum");
    const std::string_view body = std::string_view(data).substr(0, trailer_pos);
    char expected[17];
    std::snprintf(expected, sizeof expected, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(body)));
    if (trailer.substr(tag.size()) != expected)
        throw Error(ErrorCode::ChecksumMismatch, path.string() + ": checksum does not match");

    std::vector<std::string> lines;
    std::size_t pos = first_nl + 1;
    while (pos < body.size()) {
        const auto nl = body.find('\n', pos);
        lines.emplace_back(body.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ParseError("bad " + std::string(what) + " '" + std::string(s) + "'");
    return v;
}

}  // namespace synergy::detail
