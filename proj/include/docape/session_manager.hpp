#pragma once

#include "docape/config.hpp"
#include "docape/persistence.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace docape {

struct SessionSummary {
    std::string session_id;
    std::string doc_id;
    std::uint64_t revision = 0;
    std::size_t n = 0;
};

struct CreateSessionRequest {
    /// Generated when empty.
    std::string session_id;
    Document doc;
    Strategy strategy;
    std::string nmt_backend;
    std::string llm_backend;
};

/// Owns live sessions: one writer and one background regeneration worker per session.
/// Every accepted mutation is persisted before it becomes visible.
class SessionManager {
public:
    struct Options {
        std::filesystem::path data_dir = "sessions";
        DecodeOptions decode;
        PersistHooks hooks;
    };

    SessionManager(BackendRegistry& registry, Options options);
    ~SessionManager();
    SessionManager(const SessionManager&) = delete;
    SessionManager& operator=(const SessionManager&) = delete;

    /// Loads every stored session; sessions with Regenerating rows resume settling. Returns the count.
    std::size_t resume();

    /// AlreadyExists when the id is taken; BackendUnavailable / InvalidArgument from creation.
    std::shared_ptr<const PersistedSession> create(CreateSessionRequest request);
    std::vector<SessionSummary> list() const;
    /// Latest published snapshot; never waits for regeneration. NotFound.
    std::shared_ptr<const PersistedSession> get(const std::string& session_id) const;
    /// Applies and persists the edit, queues suffix regeneration, returns the new revision.
    std::uint64_t edit(const std::string& session_id, std::size_t index, const std::string& text);
    void remove(const std::string& session_id);

    /// Blocks until no row is Regenerating or the timeout passes; true when settled.
    bool wait_settled(const std::string& session_id, std::chrono::milliseconds timeout) const;

    const std::filesystem::path& data_dir() const { return options_.data_dir; }

private:
    struct Entry;
    std::shared_ptr<Entry> find(const std::string& session_id) const;
    void start_worker(const std::shared_ptr<Entry>& entry);
    void work(Entry& entry);

    BackendRegistry& registry_;
    Options options_;
    mutable std::shared_mutex map_mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

}  // namespace docape
