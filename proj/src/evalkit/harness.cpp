#include "ltm/evalkit/harness.hpp"

#include "ltm/extractor/extractor.hpp"

namespace ltm {

using nlohmann::json;

ScriptedAgent::ScriptedAgent(std::vector<std::string> lines) : lines_(std::move(lines)) {
    if (lines_.empty()) throw InvalidArgument("ScriptedAgent: no lines");
}

std::string ScriptedAgent::respond(const AssembledInput&) {
    std::string line = lines_[cursor_ % lines_.size()];
    ++cursor_;
    return line;
}

void ScriptedAgent::reset(std::uint64_t) { cursor_ = 0; }

RandomScriptAgent::RandomScriptAgent(std::vector<std::string> lines, std::uint64_t seed)
    : lines_(std::move(lines)), rng_(seed) {
    if (lines_.empty()) throw InvalidArgument("RandomScriptAgent: no lines");
}

std::string RandomScriptAgent::respond(const AssembledInput&) {
    std::uniform_int_distribution<std::size_t> pick(0, lines_.size() - 1);
    return lines_[pick(rng_)];
}

void RandomScriptAgent::reset(std::uint64_t seed) { rng_.seed(seed); }

SelfChatHarness::SelfChatHarness(EngineConfig cfg, std::shared_ptr<ClassifierPort> classifier,
                                 EncoderPair encoders, std::shared_ptr<TokenizerPort> tokenizer)
    : cfg_(std::move(cfg)), classifier_(std::move(classifier)), encoders_(std::move(encoders)),
      tokenizer_(std::move(tokenizer)) {
    cfg_.validate();
    if (!classifier_ || !encoders_.context || !encoders_.persona || !tokenizer_)
        throw InvalidArgument("SelfChatHarness: missing backend");
}

Transcript SelfChatHarness::run_episode(AgentPort& user_agent, AgentPort& bot_agent,
                                        const EpisodeSpec& spec, const std::string& episode_id,
                                        std::uint64_t seed) {
    if (spec.n_sessions < 1) throw InvalidArgument("EpisodeSpec: n_sessions must be >= 1");
    if (spec.rounds_per_session < 1) throw InvalidArgument("EpisodeSpec: rounds must be >= 1");
    if (spec.opening_lines.empty()) throw InvalidArgument("EpisodeSpec: no opening lines");

    user_agent.reset(seed);
    bot_agent.reset(seed + 1);

    Transcript t;
    t.episode_id = episode_id;

    MemoryStore user_store(Speaker::User, cfg_);
    MemoryStore bot_store(Speaker::Bot, cfg_);

    auto extract_and_write = [&](const Utterance& utt, const std::string& session_id,
                                 TurnAudit& audit) {
        if (utt.speaker == Speaker::Bot && !cfg_.extract_bot_responses) return;
        auto personas = extract_personas(utt, *classifier_, session_id);
        MemoryStore& store = utt.speaker == Speaker::User ? user_store : bot_store;
        for (auto& p : personas) {
            WriteOutcome outcome = store.write(p, *encoders_.persona);
            audit.extracted.push_back({std::move(p), outcome.kind, outcome.replaced_id});
        }
    };

    auto read_and_assemble = [&](const DialogueContext& context, TurnAudit& audit) {
        auto [user_hits, bot_hits] =
            read_both(user_store, bot_store, context, *encoders_.context, cfg_.budget_context);
        AssembledInput prompt = assemble(context, user_hits, bot_hits, cfg_, *tokenizer_);
        audit.has_prompt = true;
        audit.assembled_text = prompt.concatenated_text();
        audit.read_user = user_hits.hits;
        audit.read_bot = bot_hits.hits;
        return prompt;
    };

    try {
        for (int session = 1; session <= spec.n_sessions; ++session) {
            if (!spec.memory_enabled && session > 1) {
                user_store.clear();
                bot_store.clear();
            }
            std::string session_id = episode_id + "/s" + std::to_string(session);
            DialogueContext context;
            context.session_id = session_id;
            context.episode_id = episode_id;
            std::size_t turn_index = 0;

            SessionRecord record;
            record.session_index = session;

            for (int round = 1; round <= spec.rounds_per_session; ++round) {
                // user side
                TurnAudit user_audit;
                user_audit.session = session;
                user_audit.round = round;
                user_audit.speaker = Speaker::User;

                std::string user_text;
                if (round == 1) {
                    user_text =
                        spec.opening_lines[(session - 1) % spec.opening_lines.size()];
                } else {
                    AssembledInput prompt = read_and_assemble(context, user_audit);
                    user_text = user_agent.respond(prompt);
                }
                Utterance user_utt = make_utterance(Speaker::User, user_text, turn_index++);
                user_audit.turn_index = user_utt.turn_index;
                user_audit.text = user_utt.text;
                extract_and_write(user_utt, session_id, user_audit);
                context.append(user_utt);
                record.turns.push_back(user_utt);
                t.audit.push_back(std::move(user_audit));

                // bot side
                TurnAudit bot_audit;
                bot_audit.session = session;
                bot_audit.round = round;
                bot_audit.speaker = Speaker::Bot;

                AssembledInput prompt = read_and_assemble(context, bot_audit);
                std::string bot_text = bot_agent.respond(prompt);
                Utterance bot_utt = make_utterance(Speaker::Bot, bot_text, turn_index++);
                bot_audit.turn_index = bot_utt.turn_index;
                bot_audit.text = bot_utt.text;
                extract_and_write(bot_utt, session_id, bot_audit);
                context.append(bot_utt);
                record.turns.push_back(bot_utt);
                t.audit.push_back(std::move(bot_audit));
            }
            t.sessions.push_back(std::move(record));
        }
    } catch (const std::exception& e) {
        t.aborted = true;
        t.abort_reason = e.what();
    }
    return t;
}

CarryoverReport memory_carryover_report(const Transcript& transcript) {
    CarryoverReport report;

    std::map<std::string, int> write_session;
    for (const auto& audit : transcript.audit)
        for (const auto& rec : audit.extracted)
            if (!write_session.count(rec.persona.id)) write_session[rec.persona.id] = audit.session;

    std::map<std::string, int> first_later_read;
    for (const auto& audit : transcript.audit) {
        auto note_hits = [&](const std::vector<ReadHit>& hits) {
            for (const auto& hit : hits) {
                auto it = write_session.find(hit.persona.id);
                if (it == write_session.end() || audit.session <= it->second) continue;
                auto f = first_later_read.find(hit.persona.id);
                if (f == first_later_read.end() || audit.session < f->second)
                    first_later_read[hit.persona.id] = audit.session;
            }
        };
        note_hits(audit.read_user);
        note_hits(audit.read_bot);
    }

    report.carried_persona_count = first_later_read.size();
    for (const auto& [id, session] : first_later_read)
        ++report.first_use_histogram[{write_session.at(id), session}];
    return report;
}

json transcript_to_json(const Transcript& t) {
    json sessions = json::array();
    for (const auto& s : t.sessions) {
        json turns = json::array();
        for (const auto& u : s.turns)
            turns.push_back({{"speaker", to_string(u.speaker)},
                             {"text", u.text},
                             {"turn_index", u.turn_index}});
        sessions.push_back({{"session", s.session_index}, {"turns", std::move(turns)}});
    }

    json audit = json::array();
    for (const auto& a : t.audit) {
        json extracted = json::array();
        for (const auto& rec : a.extracted)
            extracted.push_back({{"id", rec.persona.id},
                                 {"text", rec.persona.text},
                                 {"owner", to_string(rec.persona.owner)},
                                 {"outcome", rec.outcome == WriteKind::Inserted ? "inserted" : "replaced"},
                                 {"replaced_id", rec.replaced_id}});
        auto hits_json = [](const std::vector<ReadHit>& hits) {
            json arr = json::array();
            for (const auto& h : hits)
                arr.push_back({{"id", h.persona.id}, {"text", h.persona.text}, {"score", h.score}});
            return arr;
        };
        json entry{{"session", a.session},
                   {"round", a.round},
                   {"turn_index", a.turn_index},
                   {"speaker", to_string(a.speaker)},
                   {"text", a.text},
                   {"extracted", std::move(extracted)},
                   {"read_user", hits_json(a.read_user)},
                   {"read_bot", hits_json(a.read_bot)}};
        if (a.has_prompt) entry["assembled_prompt"] = a.assembled_text;
        audit.push_back(std::move(entry));
    }

    json out{{"episode_id", t.episode_id},
             {"sessions", std::move(sessions)},
             {"audit", std::move(audit)},
             {"aborted", t.aborted}};
    if (t.aborted) out["abort_reason"] = t.abort_reason;
    return out;
}

json carryover_to_json(const CarryoverReport& report) {
    json histogram = json::object();
    for (const auto& [key, count] : report.first_use_histogram)
        histogram[std::to_string(key.first) + "->" + std::to_string(key.second)] = count;
    return json{{"carried_persona_count", report.carried_persona_count},
                {"first_use_histogram", std::move(histogram)}};
}

std::string rater_export_jsonl(const Transcript& t) {
    std::string out;
    for (const auto& s : t.sessions) {
        std::string context;
        for (const auto& u : s.turns) {
            if (u.speaker == Speaker::Bot && !context.empty()) {
                json line{{"episode_id", t.episode_id},
                          {"session", s.session_index},
                          {"context", context},
                          {"response", u.text}};
                out += line.dump();
                out.push_back('\n');
            }
            if (!context.empty()) context.push_back('\n');
            context += u.text;
        }
    }
    return out;
}

}  // namespace ltm
