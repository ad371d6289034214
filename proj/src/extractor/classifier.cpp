#include "ltm/extractor/classifier.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include <httplib.h>
#include <json.hpp>

#include "ltm/core/unicode.hpp"

namespace ltm {

using nlohmann::json;

namespace {

// First-person markers and persona cue words. Substring match for
// Chinese, token match for English.
constexpr std::array kFirstPersonZh = {"我"};
constexpr std::array kCueZh = {
    "是",   "喜欢", "爱",   "讨厌", "有",   "养",   "会",
    "今年", "岁",   "工作", "职业", "住在", "来自", "叫",
};
constexpr std::array kFirstPersonEn = {"i", "i'm", "im", "my", "mine", "we"};
constexpr std::array kCueEn = {"am", "is", "are", "like", "love", "hate", "work",
                               "live", "have", "enjoy", "favorite", "called", "old"};

bool contains_any(std::string_view text, const auto& needles) {
    return std::any_of(needles.begin(), needles.end(), [&](const char* n) {
        return text.find(n) != std::string_view::npos;
    });
}

std::vector<std::string> lower_ascii_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : text) {
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '\'') {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

bool token_match(const std::vector<std::string>& tokens, const auto& words) {
    return std::any_of(words.begin(), words.end(), [&](const char* w) {
        return std::find(tokens.begin(), tokens.end(), w) != tokens.end();
    });
}

bool is_persona_text(std::string_view raw) {
    std::string_view text = trim(raw);
    if (text.empty()) return false;
    if (contains_any(text, kFirstPersonZh) && contains_any(text, kCueZh)) return true;
    auto tokens = lower_ascii_tokens(text);
    return token_match(tokens, kFirstPersonEn) && token_match(tokens, kCueEn);
}

}  // namespace

std::vector<ClassifierVerdict> LexiconClassifier::classify(const std::vector<std::string>& texts) {
    std::vector<ClassifierVerdict> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        bool hit = is_persona_text(t);
        out.push_back({hit ? PersonaLabel::Persona : PersonaLabel::NotPersona, 1.0});
    }
    return out;
}

std::vector<ClassifierVerdict> ConstantClassifier::classify(const std::vector<std::string>& texts) {
    return std::vector<ClassifierVerdict>(texts.size(), ClassifierVerdict{label_, 1.0});
}

RemoteClassifier::RemoteClassifier(std::string base_url, int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {}

std::vector<ClassifierVerdict> RemoteClassifier::classify(const std::vector<std::string>& texts) {
    if (texts.empty()) return {};
    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);

    json request = {{"texts", texts}};
    auto res = client.Post("/classify", request.dump(), "application/json");
    if (!res)
        throw BackendError("classifier unreachable at " + base_url_, /*retriable=*/true);
    if (res->status != 200)
        throw BackendError("classifier returned status " + std::to_string(res->status),
                           /*retriable=*/res->status >= 500);
    try {
        json body = json::parse(res->body);
        const auto& labels = body.at("labels");
        const auto& confidences = body.at("confidences");
        if (labels.size() != texts.size() || confidences.size() != texts.size())
            throw BackendError("classifier response size mismatch", /*retriable=*/false);
        std::vector<ClassifierVerdict> out;
        out.reserve(texts.size());
        for (std::size_t i = 0; i < texts.size(); ++i) {
            ClassifierVerdict v;
            v.label = labels[i].get<int>() == 1 ? PersonaLabel::Persona : PersonaLabel::NotPersona;
            v.confidence = confidences[i].get<double>();
            out.push_back(v);
        }
        return out;
    } catch (const json::exception& e) {
        throw BackendError(std::string("malformed classifier response: ") + e.what(),
                           /*retriable=*/false);
    }
}

}  // namespace ltm
