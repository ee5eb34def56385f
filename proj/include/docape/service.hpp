#pragma once

#include "docape/session_manager.hpp"
#include "docape/tagger.hpp"

#include <json.hpp>

#include <memory>
#include <string>

namespace docape {

/// HTTP status for an error code (404 NotFound, 409 AlreadyExists, 400 validation, 502 backend, 500 storage).
int http_status_for(ErrorCode code);
/// Uniform error body: {code, message, detail}.
nlohmann::json error_body(const Error& error);

/// Session view returned by GET; `since` equal to the current revision of a settled
/// session yields an empty delta ({unchanged: true, sentences: []}).
nlohmann::json session_view(const PersistedSession& persisted, std::optional<std::uint64_t> since = std::nullopt);

/// JSON API over a SessionManager.
class ApiServer {
public:
    ApiServer(SessionManager& sessions, TagLexicons lexicons = TagLexicons::english_german());
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    bool listen();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace docape
