#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ltm/core/errors.hpp"

namespace ltm {

// ─── Speakers ──────────────────────────────────────────────────

enum class Speaker { User, Bot };

inline const char* to_string(Speaker s) { return s == Speaker::User ? "user" : "bot"; }

Speaker speaker_from_string(std::string_view s);

// ─── Utterance ─────────────────────────────────────────────────
// One turn of dialogue. Text must be non-empty after trimming and
// turn indices are strictly increasing within a session.

struct Utterance {
    Speaker speaker = Speaker::User;
    std::string text;
    std::size_t turn_index = 0;
};

/// Validated constructor; throws InvalidArgument on blank text.
Utterance make_utterance(Speaker speaker, std::string text, std::size_t turn_index);

// ─── DialogueContext ───────────────────────────────────────────
// The retrieval query unit: ordered utterances of one session.
// Empty only at session start.

struct DialogueContext {
    std::vector<Utterance> utterances;
    std::string session_id;
    std::string episode_id;

    bool empty() const { return utterances.empty(); }

    /// Append with ordering enforced (turn_index must exceed the last one).
    void append(Utterance u);

    /// All utterance texts joined with '\n', the encoder's view of the context.
    std::string joined_text() const;
};

// ─── PersonaSentence ───────────────────────────────────────────
// One declarative persona fact. Owner never changes once created.

enum class PersonaSource { Extracted, Seeded };

inline const char* to_string(PersonaSource s) {
    return s == PersonaSource::Extracted ? "extracted" : "seeded";
}

PersonaSource persona_source_from_string(std::string_view s);

struct PersonaSentence {
    std::string id;
    Speaker owner = Speaker::User;
    std::string text;
    PersonaSource source = PersonaSource::Extracted;
    std::int64_t created_at_turn = 0;
    std::string session_id;
};

/// Deterministic content-derived id, stable across runs.
std::string persona_id(Speaker owner, std::string_view session_id,
                       std::int64_t created_at_turn, std::size_t span_start,
                       std::string_view text);

/// Seeded persona with a deterministic id.
PersonaSentence make_seeded_persona(Speaker owner, std::string text,
                                    std::string_view tag, std::size_t index);

}  // namespace ltm
