#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "ltm/core/unicode.hpp"

namespace ltm {

// Token counting behind the budgets. Real generators bring their own
// BPE; the default counts Unicode characters.
class TokenizerPort {
public:
    virtual ~TokenizerPort() = default;
    virtual std::size_t count(std::string_view text) const = 0;

    /// The trailing portion of `text` that fits in `budget` tokens.
    virtual std::string tail(std::string_view text, std::size_t budget) const = 0;
};

class CharTokenizer : public TokenizerPort {
public:
    std::size_t count(std::string_view text) const override { return utf8_length(text); }
    std::string tail(std::string_view text, std::size_t budget) const override {
        return std::string(utf8_suffix(text, budget));
    }
};

}  // namespace ltm
