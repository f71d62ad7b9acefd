#ifndef BRATSYN_TEXT_HPP
#define BRATSYN_TEXT_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace bratsyn {

// All annotation offsets are Unicode code-point offsets (BRAT convention),
// while documents are stored as UTF-8 byte strings. CodePointIndex maps
// between the two. Invalid bytes are treated as one code point each so
// arbitrary input never faults.

class CodePointIndex {
public:
    explicit CodePointIndex(std::string_view utf8) {
        std::size_t i = 0;
        const std::size_t n = utf8.size();
        while (i < n) {
            starts_.push_back(i);
            unsigned char c = static_cast<unsigned char>(utf8[i]);
            std::size_t len = 1;
            if (c >= 0xF0) len = 4;
            else if (c >= 0xE0) len = 3;
            else if (c >= 0xC0) len = 2;
            // continuation bytes must actually be present
            std::size_t j = i + 1;
            while (j < i + len && j < n &&
                   (static_cast<unsigned char>(utf8[j]) & 0xC0) == 0x80) {
                ++j;
            }
            i = j;
        }
        starts_.push_back(n);
    }

    // number of code points
    std::size_t size() const { return starts_.size() - 1; }

    std::size_t byte_offset(std::size_t cp) const {
        if (cp >= starts_.size()) return starts_.back();
        return starts_[cp];
    }

    std::string_view slice(std::string_view utf8, std::size_t cp_start,
                           std::size_t cp_end) const {
        std::size_t b0 = byte_offset(cp_start);
        std::size_t b1 = byte_offset(cp_end);
        return utf8.substr(b0, b1 - b0);
    }

private:
    std::vector<std::size_t> starts_;
};

inline std::size_t cp_length(std::string_view utf8) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < utf8.size(); ++i) {
        if ((static_cast<unsigned char>(utf8[i]) & 0xC0) != 0x80) ++count;
    }
    return count;
}

// Case-folded, whitespace-collapsed form used as the chain-key identity.
// ASCII folding only; non-ASCII bytes pass through unchanged.
inline std::string normalize_surface(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = true; // leading whitespace trimmed
    for (char ch : s) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
            c == '\v') {
            if (!in_ws) out.push_back(' ');
            in_ws = true;
        } else {
            if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c + 32);
            out.push_back(static_cast<char>(c));
            in_ws = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
inline bool is_ascii_lower(char c) { return c >= 'a' && c <= 'z'; }

} // namespace bratsyn

#endif
