#include "ltm/assembly/assemble.hpp"

namespace ltm {

const char* to_string(SegmentKind k) {
    switch (k) {
        case SegmentKind::BotPersona: return "bot_persona";
        case SegmentKind::UserPersona: return "user_persona";
        case SegmentKind::Context: return "context";
        case SegmentKind::Response: return "response";
    }
    return "context";
}

SegmentKind segment_kind_from_string(std::string_view s) {
    if (s == "bot_persona") return SegmentKind::BotPersona;
    if (s == "user_persona") return SegmentKind::UserPersona;
    if (s == "context") return SegmentKind::Context;
    if (s == "response") return SegmentKind::Response;
    throw InvalidArgument("unknown segment kind: " + std::string(s));
}

std::string AssembledInput::concatenated_text() const {
    std::string out;
    for (const auto& s : segments) {
        if (!out.empty()) out.push_back('\n');
        out += s.text;
    }
    return out;
}

namespace {

constexpr int kBotRole = 0;
constexpr int kUserRole = 1;

// Score-ordered admission: stop at the first persona that does not fit,
// so a persona is in iff every higher-scored persona of its kind is in.
void admit_personas(const ReadResult& hits, SegmentKind kind, int role_id,
                    const std::string& role_token, std::size_t budget,
                    const TokenizerPort& tokenizer, std::vector<Segment>& segments,
                    std::vector<std::string>& dropped) {
    std::size_t used = 0;
    bool closed = false;
    for (const auto& hit : hits.hits) {
        if (closed) {
            dropped.push_back(hit.persona.id);
            continue;
        }
        std::string text = role_token.empty() ? hit.persona.text
                                              : role_token + " " + hit.persona.text;
        std::size_t tokens = tokenizer.count(text);
        if (used + tokens > budget) {
            closed = true;
            dropped.push_back(hit.persona.id);
            continue;
        }
        used += tokens;
        segments.push_back({kind, role_id, std::move(text), tokens});
    }
}

}  // namespace

AssembledInput assemble(const DialogueContext& context, const ReadResult& user_hits,
                        const ReadResult& bot_hits, const EngineConfig& cfg,
                        const TokenizerPort& tokenizer) {
    AssembledInput out;

    admit_personas(bot_hits, SegmentKind::BotPersona, kBotRole, cfg.role_token_bot,
                   cfg.budget_bot_persona, tokenizer, out.segments,
                   out.truncation.dropped_bot_personas);
    admit_personas(user_hits, SegmentKind::UserPersona, kUserRole, cfg.role_token_user,
                   cfg.budget_user_persona, tokenizer, out.segments,
                   out.truncation.dropped_user_personas);

    // Context: newest turns are kept; walk back from the end until the
    // budget is spent. The most recent utterance survives even alone,
    // trimmed from the front if it alone exceeds the budget.
    const auto& utts = context.utterances;
    std::vector<std::size_t> counts(utts.size());
    for (std::size_t i = 0; i < utts.size(); ++i) counts[i] = tokenizer.count(utts[i].text);

    std::size_t first_kept = utts.size();
    std::size_t used = 0;
    for (std::size_t i = utts.size(); i-- > 0;) {
        if (used + counts[i] > cfg.budget_context) break;
        used += counts[i];
        first_kept = i;
    }

    if (first_kept == utts.size() && !utts.empty()) {
        // Lone oversized most-recent turn.
        const Utterance& last = utts.back();
        std::string trimmed = tokenizer.tail(last.text, cfg.budget_context);
        std::size_t kept_tokens = tokenizer.count(trimmed);
        out.truncation.trimmed_context_tokens = counts.back() - kept_tokens;
        for (std::size_t i = 0; i + 1 < utts.size(); ++i)
            out.truncation.dropped_context_turns.push_back(utts[i].turn_index);
        out.segments.push_back({SegmentKind::Context,
                                last.speaker == Speaker::Bot ? kBotRole : kUserRole,
                                std::move(trimmed), kept_tokens});
    } else {
        for (std::size_t i = 0; i < first_kept; ++i)
            out.truncation.dropped_context_turns.push_back(utts[i].turn_index);
        for (std::size_t i = first_kept; i < utts.size(); ++i)
            out.segments.push_back({SegmentKind::Context,
                                    utts[i].speaker == Speaker::Bot ? kBotRole : kUserRole,
                                    utts[i].text, counts[i]});
    }

    for (const auto& s : out.segments) out.total_tokens += s.token_count;
    return out;
}

}  // namespace ltm
