#include "ltm/service/server.hpp"

#include <httplib.h>
#include <json.hpp>

namespace ltm {

using nlohmann::json;

namespace {

void reply_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
    reply_json(res, status, json{{"error", message}});
}

// Shared exception-to-status mapping for all routes.
void guarded(httplib::Response& res, const std::function<void()>& body) {
    try {
        body();
    } catch (const UnknownUser& e) {
        reply_error(res, 404, e.what());
    } catch (const UnknownSession& e) {
        reply_error(res, 404, e.what());
    } catch (const BackendError& e) {
        reply_error(res, 502, e.what());
    } catch (const InvalidArgument& e) {
        reply_error(res, 400, e.what());
    } catch (const json::exception& e) {
        reply_error(res, 400, std::string("bad request body: ") + e.what());
    } catch (const std::exception& e) {
        reply_error(res, 500, e.what());
    }
}

}  // namespace

HttpService::HttpService(Engine& engine)
    : engine_(engine), server_(std::make_unique<httplib::Server>()) {
    server_->Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        reply_json(res, 200, json{{"status", "ok"}});
    });

    server_->Post(R"(/sessions/([^/]+))",
                  [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::string requested;
            if (!req.body.empty()) {
                json body = json::parse(req.body);
                requested = body.value("session_id", "");
            }
            std::string sid = engine_.create_session(req.matches[1], requested);
            reply_json(res, 200, json{{"user_id", std::string(req.matches[1])},
                                      {"session_id", sid}});
        });
    });

    server_->Post(R"(/sessions/([^/]+)/turns)",
                  [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            json body = json::parse(req.body);
            Speaker speaker = speaker_from_string(body.value("speaker", "user"));
            std::string text = body.at("text").get<std::string>();
            std::string sid = body.value("session_id", "");
            TurnResult result = engine_.take_turn(req.matches[1], sid, speaker, text);
            reply_json(res, 200, turn_result_to_json(result));
        });
    });

    server_->Get(R"(/memories/([^/]+)/([^/]+))",
                 [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            Speaker speaker = speaker_from_string(std::string(req.matches[2]));
            json entries = json::array();
            for (const auto& e : engine_.list_memories(req.matches[1], speaker))
                entries.push_back({{"id", e.persona.id},
                                   {"text", e.persona.text},
                                   {"source", to_string(e.persona.source)},
                                   {"session_id", e.persona.session_id},
                                   {"created_at_turn", e.persona.created_at_turn},
                                   {"written_at", e.written_at},
                                   {"replaced_count", e.replaced_count}});
            reply_json(res, 200, json{{"entries", std::move(entries)}});
        });
    });

    server_->Delete(R"(/memories/([^/]+))",
                    [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            engine_.purge_user(req.matches[1]);
            res.status = 204;
        });
    });
}

HttpService::~HttpService() = default;

bool HttpService::listen(const std::string& host, int port) {
    return server_->listen(host, port);
}

int HttpService::bind_to_any_port(const std::string& host) {
    return server_->bind_to_any_port(host.c_str());
}

bool HttpService::listen_after_bind() { return server_->listen_after_bind(); }

void HttpService::stop() { server_->stop(); }

}  // namespace ltm
