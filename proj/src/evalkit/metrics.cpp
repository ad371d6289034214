#include "ltm/evalkit/metrics.hpp"

#include <cmath>
#include <map>
#include <set>

#include "ltm/core/errors.hpp"
#include "ltm/core/unicode.hpp"

namespace ltm {

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngram_counts(const std::vector<std::string>& tokens, int n) {
    NgramCounts counts;
    if (tokens.size() < static_cast<std::size_t>(n)) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
        ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
    return counts;
}

}  // namespace

double bleu_n(const std::vector<std::string>& candidate,
              const std::vector<std::string>& reference, int n) {
    if (n != 1 && n != 2) throw InvalidArgument("bleu_n: n must be 1 or 2");
    if (reference.empty()) throw InvalidArgument("bleu_n: empty reference");
    if (candidate.empty()) return 0.0;

    NgramCounts cand = ngram_counts(candidate, n);
    NgramCounts ref = ngram_counts(reference, n);

    std::size_t total = 0, clipped = 0;
    for (const auto& [gram, count] : cand) {
        total += count;
        auto it = ref.find(gram);
        if (it != ref.end()) clipped += std::min(count, it->second);
    }
    if (total == 0) return 0.0;  // candidate shorter than n

    double precision = static_cast<double>(clipped) / static_cast<double>(total);
    double c = static_cast<double>(candidate.size());
    double r = static_cast<double>(reference.size());
    double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);
    return bp * precision;
}

double char_f1(std::string_view candidate, std::string_view reference) {
    if (trim(reference).empty()) throw InvalidArgument("char_f1: empty reference");
    if (candidate.empty()) return 0.0;

    std::map<std::string_view, std::size_t> ref_counts;
    for (auto cp : utf8_chars(reference)) ++ref_counts[cp];

    auto cand_chars = utf8_chars(candidate);
    std::map<std::string_view, std::size_t> cand_counts;
    for (auto cp : cand_chars) ++cand_counts[cp];

    std::size_t overlap = 0;
    for (const auto& [cp, count] : cand_counts) {
        auto it = ref_counts.find(cp);
        if (it != ref_counts.end()) overlap += std::min(count, it->second);
    }
    if (overlap == 0) return 0.0;

    double precision = static_cast<double>(overlap) / static_cast<double>(cand_chars.size());
    double recall = static_cast<double>(overlap) / static_cast<double>(utf8_length(reference));
    return 2.0 * precision * recall / (precision + recall);
}

double distinct_n(const std::vector<std::vector<std::string>>& responses, int n) {
    if (n < 1) throw InvalidArgument("distinct_n: n must be >= 1");
    std::set<std::vector<std::string>> unique;
    std::size_t total = 0;
    for (const auto& tokens : responses) {
        if (tokens.size() < static_cast<std::size_t>(n)) continue;
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
            unique.insert(std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n));
            ++total;
        }
    }
    if (total == 0) throw InvalidArgument("distinct_n: no n-grams in response set");
    return static_cast<double>(unique.size()) / static_cast<double>(total);
}

std::vector<std::string> naive_tokens(std::string_view text) {
    bool has_space = text.find_first_of(" \t") != std::string_view::npos;
    std::vector<std::string> tokens;
    if (has_space) {
        std::size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
            std::size_t start = i;
            while (i < text.size() && text[i] != ' ' && text[i] != '\t') ++i;
            if (i > start) tokens.emplace_back(text.substr(start, i - start));
        }
    } else {
        for (auto cp : utf8_chars(text)) tokens.emplace_back(cp);
    }
    return tokens;
}

}  // namespace ltm
