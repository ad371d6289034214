#pragma once

#include <string>
#include <vector>

#include "ltm/core/types.hpp"

namespace ltm {

// DuLeMon-compatible corpus schema: UTF-8 JSON-lines, one dialogue per
// line. Personas may be plain strings (ids auto-derived from list and
// position, e.g. "bot:0") or {"id": ..., "text": ...} objects. Grounding
// labels are whole-utterance and reference persona ids.

struct DeclaredPersona {
    std::string id;
    std::string text;
};

struct CorpusTurn {
    Speaker speaker = Speaker::User;
    std::string text;
    std::vector<std::string> grounded_persona_ids;
    bool is_persona_sentence = false;
};

struct CorpusDialogue {
    std::string dialogue_id;
    std::vector<DeclaredPersona> bot_personas;
    std::vector<DeclaredPersona> user_personas_seen;
    std::vector<DeclaredPersona> user_personas_unseen;
    std::vector<CorpusTurn> turns;

    /// All declared personas of both parties.
    std::vector<DeclaredPersona> all_personas() const;
};

struct CorpusIssue {
    std::size_t line;  // 1-based line number in the source file
    std::string message;
};

struct CorpusLoadResult {
    std::vector<CorpusDialogue> dialogues;
    std::vector<CorpusIssue> issues;  // malformed lines, excluded from dialogues
};

/// Parse a JSONL corpus file. I/O failure throws; schema violations are
/// collected per line and the offending dialogue is excluded.
CorpusLoadResult load_corpus(const std::string& path);
CorpusLoadResult parse_corpus(const std::string& text);

/// One dialogue back to its JSON line.
std::string serialize_dialogue(const CorpusDialogue& d);

/// Whole corpus back to JSONL (round-trips load_corpus modulo key order).
std::string serialize_corpus(const std::vector<CorpusDialogue>& dialogues);

struct CorpusStats {
    std::size_t n_dialogues = 0;
    std::size_t n_utterances = 0;
    double avg_turns = 0.0;
    double avg_utterance_length = 0.0;  // Unicode characters
    double avg_bot_personas = 0.0;
    double avg_user_personas_seen = 0.0;
    double avg_user_personas_unseen = 0.0;
};

/// Throws InvalidArgument on an empty corpus.
CorpusStats corpus_stats(const std::vector<CorpusDialogue>& dialogues);

}  // namespace ltm
