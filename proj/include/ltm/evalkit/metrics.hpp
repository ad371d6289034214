#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ltm {

/// Sentence-level BLEU-n, single reference: the modified (clipped)
/// n-gram precision of order n with the standard brevity penalty.
/// n must be 1 or 2; an empty candidate scores 0.
double bleu_n(const std::vector<std::string>& candidate,
              const std::vector<std::string>& reference, int n);

/// Bag-of-characters F1 over Unicode codepoints (counts clipped to the
/// reference multiset). Empty candidate scores 0.
double char_f1(std::string_view candidate, std::string_view reference);

/// distinct n-grams / total n-grams across the whole response set.
/// Throws when the set contributes no n-grams.
double distinct_n(const std::vector<std::vector<std::string>>& responses, int n);

/// Whitespace-split if the text contains whitespace, else one token per
/// Unicode character. The CLI's default tokenization for eval-gen.
std::vector<std::string> naive_tokens(std::string_view text);

}  // namespace ltm
