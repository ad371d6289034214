#include "ltm/service/engine.hpp"

#include <filesystem>

#include "ltm/extractor/extractor.hpp"

namespace ltm {

namespace fs = std::filesystem;
using nlohmann::json;

EngineBackends EngineBackends::defaults(const EngineConfig& cfg) {
    EngineBackends be;
    if (cfg.encoder_url.empty()) {
        be.encoders = EncoderPair::shared(std::make_shared<HashingEncoder>(cfg.embedding_dim));
    } else {
        auto remote = std::make_shared<RemoteEncoder>(cfg.encoder_url, cfg.embedding_dim);
        be.encoders = EncoderPair::shared(remote);
    }
    if (!cfg.classifier_url.empty())
        be.classifier = std::make_shared<RemoteClassifier>(cfg.classifier_url);
    else if (cfg.classifier_backend == ClassifierBackend::ConstantPositive)
        be.classifier = std::make_shared<ConstantClassifier>(PersonaLabel::Persona);
    else
        be.classifier = std::make_shared<LexiconClassifier>();
    be.generator = cfg.generator_url.empty()
                       ? std::shared_ptr<GeneratorPort>(
                             std::make_shared<StubGenerator>(cfg.role_token_user))
                       : std::make_shared<RemoteGenerator>(cfg.generator_url);
    be.tokenizer = std::make_shared<CharTokenizer>();
    return be;
}

json turn_result_to_json(const TurnResult& result) {
    auto hits_json = [](const ReadResult& r) {
        json arr = json::array();
        for (const auto& h : r.hits)
            arr.push_back({{"id", h.persona.id}, {"text", h.persona.text}, {"score", h.score}});
        return arr;
    };
    json extracted = json::array();
    for (const auto& w : result.extracted)
        extracted.push_back({{"id", w.persona.id},
                             {"text", w.persona.text},
                             {"owner", to_string(w.persona.owner)},
                             {"outcome", w.outcome == WriteKind::Inserted ? "inserted" : "replaced"},
                             {"replaced_id", w.replaced_id}});
    json out{{"response_text", result.response_text},
             {"retrieved", {{"user", hits_json(result.retrieved_user)},
                            {"bot", hits_json(result.retrieved_bot)}}},
             {"extracted", std::move(extracted)}};
    if (result.response_ppl) out["response_ppl"] = *result.response_ppl;
    return out;
}

Engine::Engine(EngineConfig cfg, EngineBackends backends)
    : cfg_(std::move(cfg)), backends_(std::move(backends)) {
    cfg_.validate();
    if (!backends_.encoders.context || !backends_.encoders.persona || !backends_.classifier ||
        !backends_.generator || !backends_.tokenizer)
        throw InvalidArgument("Engine: missing backend");
}

std::string Engine::user_dir(const std::string& user_id) const {
    return (fs::path(cfg_.snapshot_dir) / user_id).string();
}

Engine::UserState& Engine::user_state(const std::string& user_id) {
    std::lock_guard lock(users_mutex_);
    auto it = users_.find(user_id);
    if (it != users_.end()) return *it->second;

    auto state = std::make_unique<UserState>();
    bool persistent = !cfg_.snapshot_dir.empty();
    std::string encoder_id =
        cfg_.encoder_url.empty() ? "hashing-" + std::to_string(cfg_.embedding_dim)
                                 : cfg_.encoder_url;

    if (persistent) {
        fs::path dir = user_dir(user_id);
        fs::create_directories(dir);
        fs::path user_mem = dir / "user.mem";
        fs::path bot_mem = dir / "bot.mem";
        state->user_store = fs::exists(user_mem)
                                ? MemoryStore::restore(user_mem.string(), cfg_)
                                : std::make_unique<MemoryStore>(Speaker::User, cfg_, encoder_id);
        state->bot_store = fs::exists(bot_mem)
                               ? MemoryStore::restore(bot_mem.string(), cfg_)
                               : std::make_unique<MemoryStore>(Speaker::Bot, cfg_, encoder_id);

        // Re-apply committed turns that never made it into a snapshot.
        fs::path wal_path = dir / "wal.log";
        for (const auto& turn : replay_wal(wal_path.string())) {
            for (const auto& [owner, persona] : turn.writes) {
                MemoryStore& store =
                    owner == Speaker::User ? *state->user_store : *state->bot_store;
                store.write(persona, *backends_.encoders.persona);
            }
            state->turn_counter = std::max(state->turn_counter, turn.turn_id);
        }
        state->wal = std::make_unique<WalWriter>(wal_path.string());
    } else {
        state->user_store = std::make_unique<MemoryStore>(Speaker::User, cfg_, encoder_id);
        state->bot_store = std::make_unique<MemoryStore>(Speaker::Bot, cfg_, encoder_id);
    }

    auto [pos, _] = users_.emplace(user_id, std::move(state));
    return *pos->second;
}

Engine::UserState* Engine::find_user(const std::string& user_id) const {
    std::lock_guard lock(users_mutex_);
    auto it = users_.find(user_id);
    return it == users_.end() ? nullptr : it->second.get();
}

bool Engine::knows_user(const std::string& user_id) const {
    return find_user(user_id) != nullptr;
}

std::string Engine::create_session(const std::string& user_id, const std::string& session_id) {
    UserState& state = user_state(user_id);
    std::lock_guard lock(state.mutex);
    std::string sid = session_id;
    if (sid.empty()) sid = "s" + std::to_string(++state.session_counter);
    if (state.sessions.count(sid))
        throw InvalidArgument("session already exists: " + sid);
    DialogueContext context;
    context.session_id = sid;
    state.sessions.emplace(sid, std::move(context));
    state.latest_session = sid;
    return sid;
}

bool Engine::has_session(const std::string& user_id, const std::string& session_id) const {
    const UserState* state = find_user(user_id);
    if (!state) return false;
    std::lock_guard lock(state->mutex);
    return state->sessions.count(session_id) > 0;
}

TurnResult Engine::take_turn(const std::string& user_id, const std::string& session_id,
                             Speaker speaker, const std::string& text) {
    UserState* found = find_user(user_id);
    if (!found) throw UnknownUser(user_id);
    UserState& state = *found;
    std::lock_guard lock(state.mutex);

    std::string sid = session_id.empty() ? state.latest_session : session_id;
    auto session_it = state.sessions.find(sid);
    if (session_it == state.sessions.end()) throw UnknownSession(sid);
    DialogueContext& context = session_it->second;

    std::size_t next_turn =
        context.empty() ? 0 : context.utterances.back().turn_index + 1;
    Utterance incoming = make_utterance(speaker, text, next_turn);

    // Staged writes: committed to the context and WAL only after the
    // whole pipeline has succeeded; reverted on any backend failure.
    std::vector<std::pair<MemoryStore*, WriteReceipt>> receipts;
    auto rollback = [&]() {
        for (auto it = receipts.rbegin(); it != receipts.rend(); ++it)
            it->first->revert(it->second);
    };

    TurnResult result;
    try {
        // ① extract from the incoming turn and write (write-before-read,
        // so the turn's own persona is immediately retrievable)
        MemoryStore& incoming_store =
            speaker == Speaker::User ? *state.user_store : *state.bot_store;
        for (auto& p : extract_personas(incoming, *backends_.classifier, sid)) {
            auto [outcome, receipt] =
                incoming_store.write_with_receipt(p, embed_persona(p, *backends_.encoders.persona));
            receipts.emplace_back(&incoming_store, receipt);
            result.extracted.push_back({std::move(p), outcome.kind, outcome.replaced_id});
        }

        // ② retrieve from both memories with the updated context
        DialogueContext query_context = context;
        query_context.append(incoming);
        Embedding query =
            embed_context(query_context, *backends_.encoders.context, cfg_.budget_context);
        result.retrieved_user = state.user_store->read(query);
        result.retrieved_bot = state.bot_store->read(query);

        // ③ assemble and generate
        result.assembled = assemble(query_context, result.retrieved_user, result.retrieved_bot,
                                    cfg_, *backends_.tokenizer);
        GenerationResult generated =
            backends_.generator->generate(result.assembled, cfg_.max_response_tokens);
        if (trim(generated.text).empty())
            throw BackendError("generator returned empty response", /*retriable=*/false);
        result.response_text = generated.text;
        if (generated.token_logprobs && !generated.token_logprobs->empty())
            result.response_ppl = perplexity(*generated.token_logprobs);

        // ④ extract from the generated response into the bot memory
        Utterance response =
            make_utterance(Speaker::Bot, generated.text, incoming.turn_index + 1);
        if (cfg_.extract_bot_responses) {
            for (auto& p : extract_personas(response, *backends_.classifier, sid)) {
                auto [outcome, receipt] = state.bot_store->write_with_receipt(
                    p, embed_persona(p, *backends_.encoders.persona));
                receipts.emplace_back(state.bot_store.get(), receipt);
                result.extracted.push_back({std::move(p), outcome.kind, outcome.replaced_id});
            }
        }

        // commit: context, counters, WAL
        context.append(incoming);
        context.append(response);
        ++state.turn_counter;
        if (state.wal) {
            for (const auto& w : result.extracted)
                state.wal->append_write(w.persona.owner, w.persona);
            state.wal->commit(state.turn_counter);
        }
    } catch (...) {
        rollback();
        throw;
    }
    return result;
}

std::vector<MemoryEntry> Engine::list_memories(const std::string& user_id,
                                               Speaker speaker) const {
    const UserState* state = find_user(user_id);
    if (!state) throw UnknownUser(user_id);
    return (speaker == Speaker::User ? *state->user_store : *state->bot_store).entries();
}

void Engine::purge_user(const std::string& user_id) {
    UserState* found = find_user(user_id);
    if (!found) throw UnknownUser(user_id);
    UserState& state = *found;
    std::lock_guard lock(state.mutex);
    state.user_store->clear();
    state.bot_store->clear();
    if (!cfg_.snapshot_dir.empty()) {
        if (state.wal) state.wal->reset();
        fs::path dir = user_dir(user_id);
        std::error_code ec;
        fs::remove(dir / "user.mem", ec);
        fs::remove(dir / "bot.mem", ec);
    }
}

void Engine::persist_user(const std::string& user_id) {
    UserState* found = find_user(user_id);
    if (!found) throw UnknownUser(user_id);
    if (cfg_.snapshot_dir.empty()) return;
    UserState& state = *found;
    std::lock_guard lock(state.mutex);
    fs::path dir = user_dir(user_id);
    fs::create_directories(dir);
    state.user_store->snapshot((dir / "user.mem").string());
    state.bot_store->snapshot((dir / "bot.mem").string());
    if (state.wal) state.wal->reset();
}

void Engine::persist_all() {
    std::vector<std::string> ids;
    {
        std::lock_guard lock(users_mutex_);
        for (const auto& [id, _] : users_) ids.push_back(id);
    }
    for (const auto& id : ids) persist_user(id);
}

}  // namespace ltm
