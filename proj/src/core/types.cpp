#include "ltm/core/types.hpp"

#include <sstream>

#include "ltm/core/unicode.hpp"

namespace ltm {

Speaker speaker_from_string(std::string_view s) {
    if (s == "user" || s == "u") return Speaker::User;
    if (s == "bot" || s == "s" || s == "system") return Speaker::Bot;
    throw InvalidArgument("unknown speaker: " + std::string(s));
}

PersonaSource persona_source_from_string(std::string_view s) {
    if (s == "extracted") return PersonaSource::Extracted;
    if (s == "seeded") return PersonaSource::Seeded;
    throw InvalidArgument("unknown persona source: " + std::string(s));
}

Utterance make_utterance(Speaker speaker, std::string text, std::size_t turn_index) {
    if (trim(text).empty())
        throw InvalidArgument("utterance text empty after trimming");
    return Utterance{speaker, std::move(text), turn_index};
}

void DialogueContext::append(Utterance u) {
    if (!utterances.empty() && u.turn_index <= utterances.back().turn_index)
        throw InvalidArgument("turn_index must be strictly increasing within a session");
    utterances.push_back(std::move(u));
}

std::string DialogueContext::joined_text() const {
    std::string out;
    for (const auto& u : utterances) {
        if (!out.empty()) out.push_back('\n');
        out += u.text;
    }
    return out;
}

std::string persona_id(Speaker owner, std::string_view session_id,
                       std::int64_t created_at_turn, std::size_t span_start,
                       std::string_view text) {
    std::ostringstream key;
    key << to_string(owner) << '|' << session_id << '|' << created_at_turn << '|'
        << span_start << '|' << text;
    std::ostringstream id;
    id << 'p' << std::hex << fnv1a64(key.str());
    return id.str();
}

PersonaSentence make_seeded_persona(Speaker owner, std::string text,
                                    std::string_view tag, std::size_t index) {
    if (trim(text).empty())
        throw InvalidArgument("persona text empty after trimming");
    PersonaSentence p;
    p.owner = owner;
    p.text = std::move(text);
    p.source = PersonaSource::Seeded;
    p.created_at_turn = -1;
    p.session_id = std::string(tag);
    p.id = persona_id(owner, tag, -1, index, p.text);
    return p;
}

}  // namespace ltm
