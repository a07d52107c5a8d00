#include "synergy/text.hpp"

#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

namespace synergy::text {

std::string fold_case(std::string_view s) {
    std::string out;
    icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())))
        .foldCase()
        .toUTF8String(out);
    return out;
}

std::string normalize_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    int32_t i = 0;
    const auto len = static_cast<int32_t>(s.size());
    const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
    while (i < len) {
        const int32_t start = i;
        UChar32 c;
        U8_NEXT(bytes, i, len, c);
        if (c >= 0 && u_isUWhiteSpace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.append(s.substr(static_cast<std::size_t>(start), static_cast<std::size_t>(i - start)));
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    const auto len = static_cast<int32_t>(s.size());
    const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
    int32_t i = 0;
    int32_t token_start = -1;
    auto flush = [&](int32_t end) {
        if (token_start >= 0 && end > token_start) {
            tokens.push_back(fold_case(s.substr(static_cast<std::size_t>(token_start),
                                                static_cast<std::size_t>(end - token_start))));
        }
        token_start = -1;
    };
    while (i < len) {
        const int32_t start = i;
        UChar32 c;
        U8_NEXT(bytes, i, len, c);
        const bool word = c >= 0 && (u_isalpha(c) || u_isdigit(c) || c == '-');
        if (word) {
            if (token_start < 0) token_start = start;
        } else {
            flush(start);
        }
    }
    flush(len);
    return tokens;
}

}  // namespace synergy::text
