#include "ltm/extractor/clause.hpp"

#include "ltm/core/unicode.hpp"

namespace ltm {

bool is_clause_delimiter(std::string_view cp) {
    if (cp.size() == 1) {
        char c = cp[0];
        return c == ',' || c == '.' || c == '!' || c == '?' || c == ';';
    }
    return cp == "\xEF\xBC\x8C"     // ，
           || cp == "\xE3\x80\x82"  // 。
           || cp == "\xEF\xBC\x81"  // ！
           || cp == "\xEF\xBC\x9F"  // ？
           || cp == "\xEF\xBC\x9B"; // ；
}

std::vector<Clause> segment_clauses(const Utterance& utterance) {
    const std::string& text = utterance.text;
    if (trim(text).empty())
        throw InvalidArgument("segment_clauses: empty utterance");

    std::vector<Clause> out;
    auto offs = utf8_offsets(text);
    std::size_t run_start = 0;
    bool in_run = false;

    auto flush = [&](std::size_t end) {
        if (!in_run) return;
        in_run = false;
        if (end == run_start) return;  // empty clause between delimiters
        Clause c;
        c.text = text.substr(run_start, end - run_start);
        c.parent_turn = utterance.turn_index;
        c.span_start = run_start;
        c.span_end = end;
        out.push_back(std::move(c));
    };

    for (std::size_t k = 0; k + 1 < offs.size(); ++k) {
        std::string_view cp(text.data() + offs[k], offs[k + 1] - offs[k]);
        if (is_clause_delimiter(cp)) {
            flush(offs[k]);
        } else if (!in_run) {
            in_run = true;
            run_start = offs[k];
        }
    }
    flush(text.size());
    return out;
}

}  // namespace ltm
