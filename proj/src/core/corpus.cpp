#include "ltm/core/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "ltm/core/unicode.hpp"

namespace ltm {

using nlohmann::json;

std::vector<DeclaredPersona> CorpusDialogue::all_personas() const {
    std::vector<DeclaredPersona> out;
    out.reserve(bot_personas.size() + user_personas_seen.size() + user_personas_unseen.size());
    out.insert(out.end(), bot_personas.begin(), bot_personas.end());
    out.insert(out.end(), user_personas_seen.begin(), user_personas_seen.end());
    out.insert(out.end(), user_personas_unseen.begin(), user_personas_unseen.end());
    return out;
}

namespace {

std::vector<DeclaredPersona> parse_personas(const json& j, const std::string& field,
                                            const std::string& auto_prefix) {
    std::vector<DeclaredPersona> out;
    if (!j.contains(field)) return out;
    const json& arr = j.at(field);
    if (!arr.is_array()) throw InvalidArgument(field + " must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& e = arr[i];
        DeclaredPersona p;
        if (e.is_string()) {
            p.text = e.get<std::string>();
            p.id = auto_prefix + ":" + std::to_string(i);
        } else if (e.is_object()) {
            p.id = e.at("id").get<std::string>();
            p.text = e.at("text").get<std::string>();
        } else {
            throw InvalidArgument(field + "[" + std::to_string(i) + "] must be string or object");
        }
        if (trim(p.text).empty())
            throw InvalidArgument(field + "[" + std::to_string(i) + "] has empty text");
        out.push_back(std::move(p));
    }
    return out;
}

CorpusDialogue parse_dialogue(const json& j) {
    CorpusDialogue d;
    d.dialogue_id = j.value("dialogue_id", "");
    d.bot_personas = parse_personas(j, "bot_personas", "bot");
    d.user_personas_seen = parse_personas(j, "user_personas_seen", "user_seen");
    d.user_personas_unseen = parse_personas(j, "user_personas_unseen", "user_unseen");

    std::unordered_set<std::string> declared;
    for (const auto& p : d.all_personas()) {
        if (!declared.insert(p.id).second)
            throw InvalidArgument("duplicate persona id: " + p.id);
    }

    if (!j.contains("turns") || !j.at("turns").is_array())
        throw InvalidArgument("missing turns array");
    std::size_t idx = 0;
    for (const json& t : j.at("turns")) {
        CorpusTurn turn;
        if (!t.is_object() || !t.contains("speaker"))
            throw InvalidArgument("turn " + std::to_string(idx) + ": missing speaker");
        turn.speaker = speaker_from_string(t.at("speaker").get<std::string>());
        if (!t.contains("text") || trim(t.at("text").get<std::string>()).empty())
            throw InvalidArgument("turn " + std::to_string(idx) + ": missing or empty text");
        turn.text = t.at("text").get<std::string>();
        if (t.contains("grounded_persona_ids")) {
            for (const json& g : t.at("grounded_persona_ids")) {
                std::string id = g.get<std::string>();
                if (!declared.count(id))
                    throw InvalidArgument("turn " + std::to_string(idx) +
                                          ": dangling grounded_persona_id: " + id);
                turn.grounded_persona_ids.push_back(std::move(id));
            }
        }
        turn.is_persona_sentence = t.value("is_persona_sentence", false);
        if (!d.turns.empty() && d.turns.back().speaker == turn.speaker)
            throw InvalidArgument("turn " + std::to_string(idx) + ": speakers must alternate");
        d.turns.push_back(std::move(turn));
        ++idx;
    }
    return d;
}

json personas_to_json(const std::vector<DeclaredPersona>& ps) {
    json arr = json::array();
    for (const auto& p : ps) arr.push_back({{"id", p.id}, {"text", p.text}});
    return arr;
}

}  // namespace

CorpusLoadResult parse_corpus(const std::string& text) {
    CorpusLoadResult result;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            json j = json::parse(line);
            result.dialogues.push_back(parse_dialogue(j));
        } catch (const json::exception& e) {
            result.issues.push_back({line_no, std::string("invalid JSON: ") + e.what()});
        } catch (const InvalidArgument& e) {
            result.issues.push_back({line_no, e.what()});
        }
    }
    return result;
}

CorpusLoadResult load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_corpus(buf.str());
}

std::string serialize_dialogue(const CorpusDialogue& d) {
    json j;
    j["dialogue_id"] = d.dialogue_id;
    j["bot_personas"] = personas_to_json(d.bot_personas);
    j["user_personas_seen"] = personas_to_json(d.user_personas_seen);
    j["user_personas_unseen"] = personas_to_json(d.user_personas_unseen);
    json turns = json::array();
    for (const auto& t : d.turns) {
        json tj;
        tj["speaker"] = to_string(t.speaker);
        tj["text"] = t.text;
        tj["grounded_persona_ids"] = t.grounded_persona_ids;
        tj["is_persona_sentence"] = t.is_persona_sentence;
        turns.push_back(std::move(tj));
    }
    j["turns"] = std::move(turns);
    return j.dump();
}

std::string serialize_corpus(const std::vector<CorpusDialogue>& dialogues) {
    std::string out;
    for (const auto& d : dialogues) {
        out += serialize_dialogue(d);
        out.push_back('\n');
    }
    return out;
}

CorpusStats corpus_stats(const std::vector<CorpusDialogue>& dialogues) {
    if (dialogues.empty()) throw InvalidArgument("corpus_stats: empty corpus");
    CorpusStats s;
    s.n_dialogues = dialogues.size();
    std::size_t total_chars = 0;
    std::size_t bot = 0, seen = 0, unseen = 0;
    for (const auto& d : dialogues) {
        s.n_utterances += d.turns.size();
        for (const auto& t : d.turns) total_chars += utf8_length(t.text);
        bot += d.bot_personas.size();
        seen += d.user_personas_seen.size();
        unseen += d.user_personas_unseen.size();
    }
    const double nd = static_cast<double>(s.n_dialogues);
    s.avg_turns = static_cast<double>(s.n_utterances) / nd;
    s.avg_utterance_length =
        s.n_utterances == 0 ? 0.0 : static_cast<double>(total_chars) / static_cast<double>(s.n_utterances);
    s.avg_bot_personas = static_cast<double>(bot) / nd;
    s.avg_user_personas_seen = static_cast<double>(seen) / nd;
    s.avg_user_personas_unseen = static_cast<double>(unseen) / nd;
    return s;
}

}  // namespace ltm
