#include "ltm/assembly/generator.hpp"

#include <cmath>

#include <httplib.h>

#include "ltm/core/unicode.hpp"

namespace ltm {

using nlohmann::json;

json generator_request_json(const AssembledInput& input, std::size_t max_response_tokens) {
    json segments = json::array();
    for (const auto& s : input.segments)
        segments.push_back({{"kind", to_string(s.kind)}, {"role_id", s.role_id}, {"text", s.text}});
    return json{{"segments", std::move(segments)}, {"max_response_tokens", max_response_tokens}};
}

std::vector<Segment> segments_from_request_json(const json& j, const TokenizerPort& tokenizer) {
    std::vector<Segment> out;
    for (const auto& sj : j.at("segments")) {
        Segment s;
        s.kind = segment_kind_from_string(sj.at("kind").get<std::string>());
        s.role_id = sj.at("role_id").get<int>();
        s.text = sj.at("text").get<std::string>();
        s.token_count = tokenizer.count(s.text);
        out.push_back(std::move(s));
    }
    return out;
}

GenerationResult StubGenerator::generate(const AssembledInput& input, std::size_t) {
    std::string cited;
    for (const auto& s : input.segments) {
        if (s.kind != SegmentKind::UserPersona) continue;
        std::string_view text = s.text;
        if (!user_role_token_.empty() && text.substr(0, user_role_token_.size()) == user_role_token_)
            text.remove_prefix(user_role_token_.size());
        cited = std::string(trim(text));
        break;
    }

    GenerationResult result;
    result.text = cited.empty() ? std::string("我们随便聊聊吧。")
                                : "说起来，我记得你说过：" + cited;
    result.token_logprobs =
        std::vector<double>(utf8_length(result.text), -std::log(2.0));
    return result;
}

RemoteGenerator::RemoteGenerator(std::string base_url, int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {}

GenerationResult RemoteGenerator::generate(const AssembledInput& input,
                                           std::size_t max_response_tokens) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);

    auto res = client.Post("/generate", generator_request_json(input, max_response_tokens).dump(),
                           "application/json");
    if (!res)
        throw BackendError("generator unreachable at " + base_url_, /*retriable=*/true);
    if (res->status != 200)
        throw BackendError("generator returned status " + std::to_string(res->status),
                           /*retriable=*/res->status >= 500);
    try {
        json body = json::parse(res->body);
        GenerationResult out;
        out.text = body.at("text").get<std::string>();
        if (out.text.empty())
            throw BackendError("generator returned empty response", /*retriable=*/false);
        if (body.contains("token_logprobs") && !body.at("token_logprobs").is_null())
            out.token_logprobs = body.at("token_logprobs").get<std::vector<double>>();
        return out;
    } catch (const json::exception& e) {
        throw BackendError(std::string("malformed generator response: ") + e.what(),
                           /*retriable=*/false);
    }
}

double perplexity(const std::vector<double>& token_logprobs) {
    if (token_logprobs.empty())
        throw InvalidArgument("perplexity: empty log-prob list");
    double sum = 0.0;
    for (double lp : token_logprobs) {
        if (lp > 0.0)
            throw InvalidArgument("perplexity: log-probabilities must be <= 0");
        sum += lp;
    }
    return std::exp(-sum / static_cast<double>(token_logprobs.size()));
}

}  // namespace ltm
