#include "docape/session_manager.hpp"

#include "docape/error.hpp"
#include "docape/util.hpp"

#include <condition_variable>
#include <iostream>
#include <random>
#include <thread>

namespace docape {

struct SessionManager::Entry {
    std::mutex mutex;
    std::condition_variable wake;
    PersistedSession state;
    std::optional<std::size_t> in_flight;
    bool in_flight_valid = false;
    bool stopping = false;

    mutable std::mutex snapshot_mutex;
    mutable std::condition_variable published;
    std::shared_ptr<const PersistedSession> snapshot;

    std::thread worker;

    void publish() {
        auto next = std::make_shared<const PersistedSession>(state);
        std::lock_guard lock(snapshot_mutex);
        snapshot = std::move(next);
        published.notify_all();
    }

    std::shared_ptr<const PersistedSession> current() const {
        std::lock_guard lock(snapshot_mutex);
        return snapshot;
    }

    void stop() {
        {
            std::lock_guard lock(mutex);
            stopping = true;
        }
        wake.notify_all();
        if (worker.joinable()) worker.join();
    }
};

namespace {

std::string random_session_id() {
    static constexpr char kHex[] = "0123456789abcdef";
    std::random_device device;
    std::string id;
    for (int i = 0; i < 16; ++i) id.push_back(kHex[device() % 16]);
    return id;
}

}  // namespace

SessionManager::SessionManager(BackendRegistry& registry, Options options)
    : registry_(registry), options_(std::move(options)) {}

SessionManager::~SessionManager() {
    std::unique_lock lock(map_mutex_);
    for (auto& [id, entry] : sessions_) entry->stop();
    sessions_.clear();
}

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& session_id) const {
    std::shared_lock lock(map_mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "no such session", session_id);
    return it->second;
}

std::size_t SessionManager::resume() {
    std::size_t loaded = 0;
    for (const auto& id : list_session_ids(options_.data_dir)) {
        {
            std::shared_lock lock(map_mutex_);
            if (sessions_.count(id)) continue;
        }
        try {
            auto entry = std::make_shared<Entry>();
            entry->state = load_session(id, options_.data_dir);
            entry->publish();
            {
                std::unique_lock lock(map_mutex_);
                sessions_.emplace(id, entry);
            }
            start_worker(entry);
            ++loaded;
        } catch (const Error& e) {
            std::cerr << "docape: skipping stored session " << id << ": " << e.what() << "\n";
        }
    }
    return loaded;
}

std::shared_ptr<const PersistedSession> SessionManager::create(CreateSessionRequest request) {
    if (request.session_id.empty()) request.session_id = random_session_id();
    if (!valid_session_id(request.session_id)) {
        throw Error(ErrorCode::InvalidArgument, "invalid session id", request.session_id);
    }
    auto exists = [&] {
        std::shared_lock lock(map_mutex_);
        return sessions_.count(request.session_id) > 0 ||
               std::filesystem::exists(session_path(options_.data_dir, request.session_id));
    };
    if (exists()) throw Error(ErrorCode::AlreadyExists, "session already exists", request.session_id);

    SessionBackends backends{registry_.translation(request.nmt_backend), registry_.completion(request.llm_backend),
                             request.nmt_backend, request.llm_backend};
    auto entry = std::make_shared<Entry>();
    entry->state.session = create_session(request.session_id, std::move(request.doc), request.strategy, backends,
                                          options_.decode);
    entry->state.created_at = entry->state.updated_at = utc_timestamp();
    {
        std::unique_lock lock(map_mutex_);
        if (sessions_.count(request.session_id)) {
            throw Error(ErrorCode::AlreadyExists, "session already exists", request.session_id);
        }
        persist_session(entry->state, options_.data_dir, options_.hooks);
        entry->publish();
        sessions_.emplace(request.session_id, entry);
    }
    start_worker(entry);
    return entry->current();
}

std::vector<SessionSummary> SessionManager::list() const {
    std::vector<std::shared_ptr<Entry>> entries;
    {
        std::shared_lock lock(map_mutex_);
        for (const auto& [id, entry] : sessions_) entries.push_back(entry);
    }
    std::vector<SessionSummary> out;
    for (const auto& entry : entries) {
        const auto snap = entry->current();
        out.push_back({snap->session.session_id, snap->session.doc.doc_id, snap->session.revision,
                       snap->session.size()});
    }
    return out;
}

std::shared_ptr<const PersistedSession> SessionManager::get(const std::string& session_id) const {
    return find(session_id)->current();
}

std::uint64_t SessionManager::edit(const std::string& session_id, std::size_t index, const std::string& text) {
    auto entry = find(session_id);
    std::uint64_t revision = 0;
    {
        std::lock_guard lock(entry->mutex);
        if (entry->stopping) throw Error(ErrorCode::NotFound, "no such session", session_id);
        PersistedSession next = entry->state;
        mark_edit(next.session, index, text);
        next.updated_at = utc_timestamp();
        persist_session(next, options_.data_dir, options_.hooks);
        if (entry->in_flight && index <= *entry->in_flight) entry->in_flight_valid = false;
        entry->state = std::move(next);
        revision = entry->state.session.revision;
        entry->publish();
    }
    entry->wake.notify_all();
    return revision;
}

void SessionManager::remove(const std::string& session_id) {
    std::shared_ptr<Entry> entry;
    {
        std::unique_lock lock(map_mutex_);
        auto it = sessions_.find(session_id);
        if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "no such session", session_id);
        entry = it->second;
        sessions_.erase(it);
    }
    entry->stop();
    remove_session(session_id, options_.data_dir);
}

bool SessionManager::wait_settled(const std::string& session_id, std::chrono::milliseconds timeout) const {
    auto entry = find(session_id);
    std::unique_lock lock(entry->snapshot_mutex);
    return entry->published.wait_for(lock, timeout, [&] { return entry->snapshot->session.settled(); });
}

void SessionManager::start_worker(const std::shared_ptr<Entry>& entry) {
    Entry* raw = entry.get();
    entry->worker = std::thread([this, raw] { work(*raw); });
}

void SessionManager::work(Entry& entry) {
    std::unique_lock lock(entry.mutex);
    while (true) {
        entry.wake.wait(lock, [&] { return entry.stopping || next_pending(entry.state.session).has_value(); });
        if (entry.stopping) return;
        const std::size_t i = *next_pending(entry.state.session);
        const Session view = entry.state.session;
        entry.in_flight = i;
        entry.in_flight_valid = true;
        lock.unlock();

        SentenceOutput output{view.nmt_hyps[i], Provenance::NMTFallback};
        try {
            output = regenerate_step(view, i, registry_.completion(view.llm_backend)).output;
        } catch (const std::exception& e) {
            std::cerr << "docape: session " << view.session_id << " sentence " << i << " fell back: " << e.what()
                      << "\n";
        }

        lock.lock();
        const bool valid = entry.in_flight_valid && !entry.stopping;
        entry.in_flight.reset();
        if (!valid) continue;
        PersistedSession next = entry.state;
        commit_step(next.session, i, std::move(output));
        next.updated_at = utc_timestamp();
        try {
            persist_session(next, options_.data_dir, options_.hooks);
        } catch (const std::exception& e) {
            std::cerr << "docape: session " << view.session_id << " could not be stored: " << e.what() << "\n";
            entry.wake.wait_for(lock, std::chrono::seconds(1), [&] { return entry.stopping; });
            continue;
        }
        entry.state = std::move(next);
        entry.publish();
    }
}

}  // namespace docape
