#include "ltm/encoder/encoder.hpp"

#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "ltm/core/unicode.hpp"

namespace ltm {

using nlohmann::json;

Embedding HashingEncoder::embed_text(std::string_view text) const {
    if (trim(text).empty())
        throw InvalidArgument("HashingEncoder: cannot embed empty text");

    std::vector<float> counts(dim_, 0.0f);
    auto offs = utf8_offsets(text);
    const std::size_t chars = offs.size() - 1;
    for (std::size_t start = 0; start < chars; ++start) {
        for (std::size_t n = 1; n <= 3 && start + n <= chars; ++n) {
            std::string_view gram(text.data() + offs[start], offs[start + n] - offs[start]);
            counts[fnv1a64(gram) % dim_] += 1.0f;
        }
    }

    double sq = 0.0;
    for (float v : counts) sq += static_cast<double>(v) * static_cast<double>(v);
    const float inv = static_cast<float>(1.0 / std::sqrt(sq));
    for (float& v : counts) v *= inv;
    return make_embedding(std::move(counts));
}

std::vector<Embedding> HashingEncoder::encode(EncodeRole, const std::vector<std::string>& texts) {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_text(t));
    return out;
}

RemoteEncoder::RemoteEncoder(std::string base_url, std::size_t dim, int timeout_seconds)
    : base_url_(std::move(base_url)), dim_(dim), timeout_seconds_(timeout_seconds) {}

std::vector<Embedding> RemoteEncoder::encode(EncodeRole role,
                                             const std::vector<std::string>& texts) {
    if (texts.empty()) return {};
    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);

    json request = {{"role", to_string(role)}, {"texts", texts}};
    auto res = client.Post("/encode", request.dump(), "application/json");
    if (!res)
        throw BackendError("encoder unreachable at " + base_url_, /*retriable=*/true);
    if (res->status != 200)
        throw BackendError("encoder returned status " + std::to_string(res->status),
                           /*retriable=*/res->status >= 500);
    try {
        json body = json::parse(res->body);
        const auto& vectors = body.at("vectors");
        if (vectors.size() != texts.size())
            throw BackendError("encoder response size mismatch", /*retriable=*/false);
        std::vector<Embedding> out;
        out.reserve(texts.size());
        for (const auto& vec : vectors) {
            std::vector<float> values;
            values.reserve(vec.size());
            for (const auto& x : vec) values.push_back(x.get<float>());
            if (values.size() != dim_)
                throw BackendError("encoder returned wrong dimension", /*retriable=*/false);
            out.push_back(make_embedding(std::move(values)));
        }
        return out;
    } catch (const json::exception& e) {
        throw BackendError(std::string("malformed encoder response: ") + e.what(),
                           /*retriable=*/false);
    }
}

Embedding embed_context(const DialogueContext& context, EncoderPort& encoder,
                        std::size_t window) {
    if (context.empty())
        throw InvalidArgument("embed_context: empty context");
    std::string joined = context.joined_text();
    std::string windowed(utf8_suffix(joined, window));
    return encoder.encode_one(EncodeRole::Context, windowed);
}

Embedding embed_persona(const PersonaSentence& persona, EncoderPort& encoder) {
    if (trim(persona.text).empty())
        throw InvalidArgument("embed_persona: empty persona text");
    return encoder.encode_one(EncodeRole::Persona, persona.text);
}

}  // namespace ltm
