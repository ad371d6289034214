#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ltm/core/types.hpp"
#include "ltm/encoder/embedding.hpp"

namespace ltm {

enum class EncodeRole { Context, Persona };

inline const char* to_string(EncodeRole r) {
    return r == EncodeRole::Context ? "context" : "persona";
}

// Text-to-vector backend. Batching must not change results; callers may
// batch freely. Wire shape: { "role": ..., "texts": [...] } -> { "vectors": [[...]] }.
class EncoderPort {
public:
    virtual ~EncoderPort() = default;
    virtual std::size_t dim() const = 0;
    virtual std::vector<Embedding> encode(EncodeRole role,
                                          const std::vector<std::string>& texts) = 0;

    Embedding encode_one(EncodeRole role, const std::string& text) {
        return encode(role, std::vector<std::string>{text}).front();
    }
};

// Reference embedder: character n-gram (n = 1..3) feature hashing into
// `dim` buckets, raw counts, L2-normalized. Deterministic and
// language-agnostic, so retrieval behavior is testable without weights.
class HashingEncoder : public EncoderPort {
public:
    explicit HashingEncoder(std::size_t dim = 256) : dim_(dim) {
        if (dim == 0) throw InvalidArgument("HashingEncoder: dim must be positive");
    }
    std::size_t dim() const override { return dim_; }
    std::vector<Embedding> encode(EncodeRole role, const std::vector<std::string>& texts) override;

    /// Embed one raw string (role-independent for this backend).
    Embedding embed_text(std::string_view text) const;

private:
    std::size_t dim_;
};

// HTTP/JSON client for trained dual encoders. POSTs to <base_url>/encode.
class RemoteEncoder : public EncoderPort {
public:
    RemoteEncoder(std::string base_url, std::size_t dim, int timeout_seconds = 5);
    std::size_t dim() const override { return dim_; }
    std::vector<Embedding> encode(EncodeRole role, const std::vector<std::string>& texts) override;

private:
    std::string base_url_;
    std::size_t dim_;
    int timeout_seconds_;
};

// The two encoder slots of the matching model. The reference backend
// shares one encoder for both; trained dual encoders drop in per slot.
struct EncoderPair {
    std::shared_ptr<EncoderPort> context;
    std::shared_ptr<EncoderPort> persona;

    static EncoderPair shared(std::shared_ptr<EncoderPort> one) { return {one, one}; }
};

/// Encode the running context: utterances joined with '\n', truncated to
/// the most recent `window` characters before encoding.
Embedding embed_context(const DialogueContext& context, EncoderPort& encoder,
                        std::size_t window = 384);

/// Encode one persona sentence through the persona slot.
Embedding embed_persona(const PersonaSentence& persona, EncoderPort& encoder);

}  // namespace ltm
