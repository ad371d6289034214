#include "ltm/core/json_io.hpp"

namespace ltm {

using nlohmann::json;

json persona_to_json(const PersonaSentence& p) {
    return json{{"id", p.id},
                {"owner", to_string(p.owner)},
                {"text", p.text},
                {"source", to_string(p.source)},
                {"created_at_turn", p.created_at_turn},
                {"session_id", p.session_id}};
}

PersonaSentence persona_from_json(const json& j) {
    PersonaSentence p;
    p.id = j.at("id").get<std::string>();
    p.owner = speaker_from_string(j.at("owner").get<std::string>());
    p.text = j.at("text").get<std::string>();
    p.source = persona_source_from_string(j.at("source").get<std::string>());
    p.created_at_turn = j.at("created_at_turn").get<std::int64_t>();
    p.session_id = j.at("session_id").get<std::string>();
    return p;
}

json utterance_to_json(const Utterance& u) {
    return json{{"speaker", to_string(u.speaker)}, {"text", u.text}, {"turn_index", u.turn_index}};
}

Utterance utterance_from_json(const json& j) {
    return make_utterance(speaker_from_string(j.at("speaker").get<std::string>()),
                          j.at("text").get<std::string>(),
                          j.at("turn_index").get<std::size_t>());
}

}  // namespace ltm
