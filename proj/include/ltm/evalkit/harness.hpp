#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "ltm/assembly/assemble.hpp"
#include "ltm/assembly/generator.hpp"
#include "ltm/extractor/classifier.hpp"
#include "ltm/memory/store.hpp"

namespace ltm {

// One side of a self-chat. Agents receive the assembled prompt built
// from the episode's shared memory pair and produce the next utterance.
class AgentPort {
public:
    virtual ~AgentPort() = default;
    virtual std::string respond(const AssembledInput& prompt) = 0;

    /// Rewind internal state so a fixed seed reproduces the episode.
    virtual void reset(std::uint64_t seed) { (void)seed; }
};

// Cycles through a fixed list of lines, ignoring the prompt.
class ScriptedAgent : public AgentPort {
public:
    explicit ScriptedAgent(std::vector<std::string> lines);
    std::string respond(const AssembledInput& prompt) override;
    void reset(std::uint64_t seed) override;

private:
    std::vector<std::string> lines_;
    std::size_t cursor_ = 0;
};

// Samples lines with a seeded RNG; still deterministic per seed.
class RandomScriptAgent : public AgentPort {
public:
    RandomScriptAgent(std::vector<std::string> lines, std::uint64_t seed);
    std::string respond(const AssembledInput& prompt) override;
    void reset(std::uint64_t seed) override;

private:
    std::vector<std::string> lines_;
    std::mt19937_64 rng_;
};

// Persona-citing stub, the same behavior as StubGenerator.
class EchoAgent : public AgentPort {
public:
    explicit EchoAgent(std::string user_role_token = "user persona:")
        : generator_(std::move(user_role_token)) {}
    std::string respond(const AssembledInput& prompt) override {
        return generator_.generate(prompt, 128).text;
    }

private:
    StubGenerator generator_;
};

struct EpisodeSpec {
    int n_sessions = 4;
    int rounds_per_session = 16;  // one round = one exchange, two utterances
    std::vector<std::string> opening_lines;  // session openings, cycled
    bool memory_enabled = true;
};

struct ExtractionRecord {
    PersonaSentence persona;
    WriteKind outcome = WriteKind::Inserted;
    std::string replaced_id;
};

// Everything that happened around one utterance: what was extracted and
// written, what both memories returned, and the exact prompt the
// speaker saw (absent for scripted session openings).
struct TurnAudit {
    int session = 0;  // 1-based
    int round = 0;    // 1-based
    std::size_t turn_index = 0;
    Speaker speaker = Speaker::User;
    std::string text;
    std::vector<ExtractionRecord> extracted;
    bool has_prompt = false;
    std::string assembled_text;
    std::vector<ReadHit> read_user;
    std::vector<ReadHit> read_bot;
};

struct SessionRecord {
    int session_index = 0;  // 1-based
    std::vector<Utterance> turns;
};

struct Transcript {
    std::string episode_id;
    std::vector<SessionRecord> sessions;
    std::vector<TurnAudit> audit;
    bool aborted = false;
    std::string abort_reason;
};

// Runs episodes over a private memory pair per episode. Between
// sessions the context always resets; the memories persist only while
// memory is enabled.
class SelfChatHarness {
public:
    SelfChatHarness(EngineConfig cfg, std::shared_ptr<ClassifierPort> classifier,
                    EncoderPair encoders, std::shared_ptr<TokenizerPort> tokenizer);

    Transcript run_episode(AgentPort& user_agent, AgentPort& bot_agent, const EpisodeSpec& spec,
                           const std::string& episode_id, std::uint64_t seed = 0);

private:
    EngineConfig cfg_;
    std::shared_ptr<ClassifierPort> classifier_;
    EncoderPair encoders_;
    std::shared_ptr<TokenizerPort> tokenizer_;
};

struct CarryoverReport {
    std::size_t carried_persona_count = 0;
    // (written in session i -> first retrieved in session j > i) -> count
    std::map<std::pair<int, int>, std::size_t> first_use_histogram;
};

/// Personas written in one session and retrieved in a later one.
CarryoverReport memory_carryover_report(const Transcript& transcript);

nlohmann::json transcript_to_json(const Transcript& transcript);
nlohmann::json carryover_to_json(const CarryoverReport& report);

/// Flat JSONL of (context, response) pairs per bot turn, for raters.
std::string rater_export_jsonl(const Transcript& transcript);

}  // namespace ltm
