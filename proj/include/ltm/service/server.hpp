#pragma once

#include <memory>
#include <string>

#include "ltm/service/engine.hpp"

namespace httplib {
class Server;
}

namespace ltm {

// HTTP/JSON front end over the engine.
//
//   POST   /sessions/{user_id}              -> { "session_id": ... }
//   POST   /sessions/{user_id}/turns        { speaker, text, session_id? }
//   GET    /memories/{user_id}/{speaker}    -> { "entries": [...] }
//   DELETE /memories/{user_id}              -> 204
//   GET    /healthz
//
// Unknown users/sessions map to 404, backend failures to 502.
class HttpService {
public:
    explicit HttpService(Engine& engine);
    ~HttpService();

    /// Blocks serving requests until stop() is called.
    bool listen(const std::string& host, int port);

    /// Bind to an OS-assigned port and serve on a background thread
    /// managed by the caller via listen_after_bind.
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();

    void stop();

private:
    Engine& engine_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace ltm
