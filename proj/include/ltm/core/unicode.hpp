#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ltm {

// UTF-8 helpers. The corpus is Chinese-heavy, so "character" means
// Unicode codepoint everywhere, never byte.

/// Number of codepoints in a UTF-8 string.
std::size_t utf8_length(std::string_view text);

/// Byte offsets of every codepoint start, plus a final entry == text.size().
std::vector<std::size_t> utf8_offsets(std::string_view text);

/// The last `n` codepoints (whole string if shorter).
std::string_view utf8_suffix(std::string_view text, std::size_t n);

/// Codepoints as individual UTF-8 chunks.
std::vector<std::string_view> utf8_chars(std::string_view text);

/// Strip ASCII whitespace and U+3000 from both ends.
std::string_view trim(std::string_view text);

/// FNV-1a 64-bit over raw bytes; the id and feature-hash workhorse.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull);

}  // namespace ltm
