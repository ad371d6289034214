#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ltm/core/types.hpp"

namespace ltm {

// A maximal run of non-delimiter text inside one utterance.
// char_span holds byte offsets into the original UTF-8 string, so
// spans plus the delimiter gaps between them reconstruct the input
// exactly.
struct Clause {
    std::string text;
    std::size_t parent_turn = 0;
    std::size_t span_start = 0;  // byte offset, inclusive
    std::size_t span_end = 0;    // byte offset, exclusive
};

/// Delimiters: ，。！？；ASCII , . ! ? ;
bool is_clause_delimiter(std::string_view codepoint);

/// Split an utterance at punctuation. Runs between adjacent delimiters
/// are empty and dropped; worst case the whole utterance is one clause.
std::vector<Clause> segment_clauses(const Utterance& utterance);

}  // namespace ltm
