#pragma once

#include <string>
#include <vector>

#include "ltm/assembly/tokenizer.hpp"
#include "ltm/core/config.hpp"
#include "ltm/memory/store.hpp"

namespace ltm {

// Generator input segments. role_id distinguishes the chat parties
// (bot = 0, user = 1); context segments carry their utterance's speaker.
enum class SegmentKind { BotPersona, UserPersona, Context, Response };

const char* to_string(SegmentKind k);
SegmentKind segment_kind_from_string(std::string_view s);

struct Segment {
    SegmentKind kind = SegmentKind::Context;
    int role_id = 0;  // bot = 0, user = 1
    std::string text;
    std::size_t token_count = 0;
};

struct TruncationReport {
    std::vector<std::string> dropped_bot_personas;   // persona ids, lowest-scored tail
    std::vector<std::string> dropped_user_personas;  // persona ids
    std::vector<std::size_t> dropped_context_turns;  // turn indices, oldest first
    std::size_t trimmed_context_tokens = 0;          // cut from the oldest kept turn

    bool empty() const {
        return dropped_bot_personas.empty() && dropped_user_personas.empty() &&
               dropped_context_turns.empty() && trimmed_context_tokens == 0;
    }
};

// Role-segmented, budget-bounded generator input. Segment order is
// fixed: bot personas, user personas, then context.
struct AssembledInput {
    std::vector<Segment> segments;
    std::size_t total_tokens = 0;
    TruncationReport truncation;

    std::string concatenated_text() const;
};

/// Build the generator input. Personas are admitted highest-score-first
/// until the first one that would overflow its kind budget; the context
/// keeps its most recent turns, dropping the oldest ones and trimming
/// the front of a lone oversized turn.
AssembledInput assemble(const DialogueContext& context, const ReadResult& user_hits,
                        const ReadResult& bot_hits, const EngineConfig& cfg,
                        const TokenizerPort& tokenizer);

}  // namespace ltm
