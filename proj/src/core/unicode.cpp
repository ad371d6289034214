#include "ltm/core/unicode.hpp"

namespace ltm {

namespace {

// Length in bytes of the UTF-8 sequence starting at `lead`.
// Continuation or invalid lead bytes advance by 1 so malformed
// input never stalls a scan.
std::size_t seq_len(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead & 0xE0) == 0xC0) return 2;
    if ((lead & 0xF0) == 0xE0) return 3;
    if ((lead & 0xF8) == 0xF0) return 4;
    return 1;
}

}  // namespace

std::size_t utf8_length(std::string_view text) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < text.size(); i += seq_len(static_cast<unsigned char>(text[i])))
        ++n;
    return n;
}

std::vector<std::size_t> utf8_offsets(std::string_view text) {
    std::vector<std::size_t> offs;
    offs.reserve(text.size() + 1);
    std::size_t i = 0;
    while (i < text.size()) {
        offs.push_back(i);
        i += seq_len(static_cast<unsigned char>(text[i]));
    }
    offs.push_back(text.size());
    return offs;
}

std::string_view utf8_suffix(std::string_view text, std::size_t n) {
    auto offs = utf8_offsets(text);
    std::size_t chars = offs.size() - 1;
    if (chars <= n) return text;
    return text.substr(offs[chars - n]);
}

std::vector<std::string_view> utf8_chars(std::string_view text) {
    std::vector<std::string_view> out;
    auto offs = utf8_offsets(text);
    for (std::size_t k = 0; k + 1 < offs.size(); ++k)
        out.push_back(text.substr(offs[k], offs[k + 1] - offs[k]));
    return out;
}

std::string_view trim(std::string_view text) {
    auto is_space_at = [&](std::size_t i, std::size_t& width) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            width = 1;
            return true;
        }
        // U+3000 ideographic space: E3 80 80
        if (c == 0xE3 && i + 2 < text.size() &&
            static_cast<unsigned char>(text[i + 1]) == 0x80 &&
            static_cast<unsigned char>(text[i + 2]) == 0x80) {
            width = 3;
            return true;
        }
        return false;
    };
    std::size_t begin = 0;
    std::size_t w = 0;
    while (begin < text.size() && is_space_at(begin, w)) begin += w;
    std::size_t end = text.size();
    while (end > begin) {
        // walk back one codepoint
        std::size_t prev = end - 1;
        while (prev > begin && (static_cast<unsigned char>(text[prev]) & 0xC0) == 0x80) --prev;
        if (is_space_at(prev, w) && prev + w == end)
            end = prev;
        else
            break;
    }
    return text.substr(begin, end - begin);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace ltm
