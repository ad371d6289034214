#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ltm/assembly/assemble.hpp"
#include "ltm/assembly/generator.hpp"
#include "ltm/extractor/classifier.hpp"
#include "ltm/memory/store.hpp"
#include "ltm/memory/wal.hpp"

namespace ltm {

struct EngineBackends {
    EncoderPair encoders;
    std::shared_ptr<ClassifierPort> classifier;
    std::shared_ptr<GeneratorPort> generator;
    std::shared_ptr<TokenizerPort> tokenizer;

    /// Reference backends everywhere, honoring configured remote URLs.
    static EngineBackends defaults(const EngineConfig& cfg);
};

struct ExtractedWrite {
    PersonaSentence persona;
    WriteKind outcome = WriteKind::Inserted;
    std::string replaced_id;
};

struct TurnResult {
    std::string response_text;
    std::optional<double> response_ppl;  // when the generator returned log-probs
    ReadResult retrieved_user;
    ReadResult retrieved_bot;
    std::vector<ExtractedWrite> extracted;  // incoming turn first, then bot response
    AssembledInput assembled;
};

nlohmann::json turn_result_to_json(const TurnResult& result);

// The engine behind both the HTTP service and the REPL: per-user memory
// pairs shared across that user's sessions, per-session contexts, and
// the turn pipeline (extract -> write -> read -> assemble -> generate ->
// extract bot response). A turn either commits all of its memory writes
// or none of them.
class Engine {
public:
    Engine(EngineConfig cfg, EngineBackends backends);

    /// New session for a user, creating (or loading from snapshots) the
    /// user's store pair on first touch. Returns the session id.
    std::string create_session(const std::string& user_id,
                               const std::string& session_id = "");

    bool has_session(const std::string& user_id, const std::string& session_id) const;

    /// Full turn pipeline. Empty session_id targets the user's most
    /// recently created session.
    TurnResult take_turn(const std::string& user_id, const std::string& session_id,
                         Speaker speaker, const std::string& text);

    std::vector<MemoryEntry> list_memories(const std::string& user_id, Speaker speaker) const;

    /// Drop memory contents, snapshots, and WAL. Sessions survive.
    void purge_user(const std::string& user_id);

    /// Snapshot a user's stores and truncate the WAL.
    void persist_user(const std::string& user_id);
    void persist_all();

    bool knows_user(const std::string& user_id) const;
    const EngineConfig& config() const { return cfg_; }

private:
    struct UserState {
        std::unique_ptr<MemoryStore> user_store;
        std::unique_ptr<MemoryStore> bot_store;
        std::unique_ptr<WalWriter> wal;
        std::map<std::string, DialogueContext> sessions;
        std::string latest_session;
        std::uint64_t turn_counter = 0;
        std::uint64_t session_counter = 0;
        mutable std::mutex mutex;  // serializes turns per user
    };

    UserState& user_state(const std::string& user_id);
    UserState* find_user(const std::string& user_id) const;
    std::string user_dir(const std::string& user_id) const;

    EngineConfig cfg_;
    EngineBackends backends_;
    std::map<std::string, std::unique_ptr<UserState>> users_;
    mutable std::mutex users_mutex_;
};

}  // namespace ltm
