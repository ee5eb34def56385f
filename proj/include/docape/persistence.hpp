#pragma once

#include "docape/feedback.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace docape {

inline constexpr int kSessionSchemaVersion = 1;

struct PersistedSession {
    int schema_version = kSessionSchemaVersion;
    Session session;
    std::string created_at;
    std::string updated_at;

    friend bool operator==(const PersistedSession&, const PersistedSession&) = default;
};

/// Deterministic bytes: identical state always serializes identically.
std::string serialize(const PersistedSession& persisted);
/// CorruptState (detail = byte offset) on malformed content, VersionMismatch on another schema.
PersistedSession deserialize(std::string_view bytes);

struct PersistHooks {
    /// Runs after the temp file is fully written and synced, before the rename.
    /// Throwing here simulates a crash between the two.
    std::function<void(const std::filesystem::path& temp_file)> before_rename;
};

std::filesystem::path session_path(const std::filesystem::path& data_dir, const std::string& session_id);

/// Atomic write (temp file + fsync + rename) to `<data_dir>/<session_id>.json`. StorageError on failure.
void persist_session(const PersistedSession& persisted, const std::filesystem::path& data_dir,
                     const PersistHooks& hooks = {});

/// NotFound / CorruptState / VersionMismatch.
PersistedSession load_session(const std::string& session_id, const std::filesystem::path& data_dir);

void remove_session(const std::string& session_id, const std::filesystem::path& data_dir);

/// Ids of every stored session, sorted.
std::vector<std::string> list_session_ids(const std::filesystem::path& data_dir);

}  // namespace docape
