#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ltm/assembly/assemble.hpp"

namespace ltm {

struct GenerationResult {
    std::string text;
    std::optional<std::vector<double>> token_logprobs;  // natural log, each <= 0
};

// Response generator behind the assembled input. Wire shape:
// { "segments": [{kind, role_id, text}], "max_response_tokens": n }
// -> { "text": ..., "token_logprobs": [...] (optional) }.
class GeneratorPort {
public:
    virtual ~GeneratorPort() = default;
    virtual GenerationResult generate(const AssembledInput& input,
                                      std::size_t max_response_tokens) = 0;
};

/// The request payload for a generator backend.
nlohmann::json generator_request_json(const AssembledInput& input,
                                      std::size_t max_response_tokens);

/// Parse segments back out of a request payload (round-trips
/// generator_request_json).
std::vector<Segment> segments_from_request_json(const nlohmann::json& j,
                                                const TokenizerPort& tokenizer);

// Deterministic echo generator: cites the top-1 user persona when one
// was retrieved, otherwise falls back to a fixed line. Emits one
// -ln(2) logprob per response character so the perplexity path stays
// exercised end to end.
class StubGenerator : public GeneratorPort {
public:
    explicit StubGenerator(std::string user_role_token = "user persona:")
        : user_role_token_(std::move(user_role_token)) {}
    GenerationResult generate(const AssembledInput& input,
                              std::size_t max_response_tokens) override;

private:
    std::string user_role_token_;
};

// HTTP/JSON client for a real generator. POSTs to <base_url>/generate.
class RemoteGenerator : public GeneratorPort {
public:
    explicit RemoteGenerator(std::string base_url, int timeout_seconds = 15);
    GenerationResult generate(const AssembledInput& input,
                              std::size_t max_response_tokens) override;

private:
    std::string base_url_;
    int timeout_seconds_;
};

/// exp(-mean(logprobs)). Throws on an empty list or a positive entry.
double perplexity(const std::vector<double>& token_logprobs);

}  // namespace ltm
