#pragma once

#include <stdexcept>
#include <string>

namespace ltm {

// Base for everything thrown by the engine.
struct LtmError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad arguments, violated preconditions, malformed inputs.
struct InvalidArgument : LtmError {
    using LtmError::LtmError;
};

// File / stream problems.
struct IoError : LtmError {
    using LtmError::LtmError;
};

// A remote backend (classifier, encoder, generator) failed.
// `retriable` distinguishes transient transport failures from
// permanent ones such as a malformed response body.
struct BackendError : LtmError {
    BackendError(const std::string& msg, bool retriable_)
        : LtmError(msg), retriable(retriable_) {}
    bool retriable = true;
};

struct UnknownUser : LtmError {
    explicit UnknownUser(const std::string& user_id)
        : LtmError("unknown user: " + user_id) {}
};

struct UnknownSession : LtmError {
    explicit UnknownSession(const std::string& session_id)
        : LtmError("unknown session: " + session_id) {}
};

}  // namespace ltm
