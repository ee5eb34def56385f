#include "docape/persistence.hpp"

#include "docape/error.hpp"
#include "docape/util.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

namespace docape {

using nlohmann::json;

namespace {

void write_all_synced(const std::filesystem::path& path, std::string_view bytes) {
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw Error(ErrorCode::StorageError, "cannot create " + path.string(), std::strerror(errno));
    std::size_t written = 0;
    while (written < bytes.size()) {
        const auto n = ::write(fd, bytes.data() + written, bytes.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            const std::string why = std::strerror(errno);
            ::close(fd);
            throw Error(ErrorCode::StorageError, "cannot write " + path.string(), why);
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0) {
        const std::string why = std::strerror(errno);
        ::close(fd);
        throw Error(ErrorCode::StorageError, "cannot sync " + path.string(), why);
    }
    ::close(fd);
}

}  // namespace

std::string serialize(const PersistedSession& persisted) {
    json j{{"schema_version", persisted.schema_version},
           {"created_at", persisted.created_at},
           {"updated_at", persisted.updated_at},
           {"session", to_json(persisted.session)}};
    return j.dump(2) + "\n";
}

PersistedSession deserialize(std::string_view bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::CorruptState, std::string("session file is not valid JSON: ") + e.what(),
                    std::to_string(e.byte));
    }
    PersistedSession out;
    try {
        out.schema_version = j.at("schema_version").get<int>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptState, "session file has no schema version", "0");
    }
    if (out.schema_version != kSessionSchemaVersion) {
        throw Error(ErrorCode::VersionMismatch,
                    "session schema " + std::to_string(out.schema_version) + " is not supported",
                    std::to_string(out.schema_version));
    }
    try {
        out.created_at = j.at("created_at").get<std::string>();
        out.updated_at = j.at("updated_at").get<std::string>();
        out.session = session_from_json(j.at("session"));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptState, std::string("session file is incomplete: ") + e.what(), "0");
    } catch (const Error& e) {
        throw Error(ErrorCode::CorruptState, std::string("session file is inconsistent: ") + e.what(), "0");
    }
    const auto& s = out.session;
    if (s.nmt_hyps.size() != s.size() || s.outputs.size() != s.size() || s.status.size() != s.size()) {
        throw Error(ErrorCode::CorruptState, "session arrays disagree in length", "0");
    }
    return out;
}

std::filesystem::path session_path(const std::filesystem::path& data_dir, const std::string& session_id) {
    if (!valid_session_id(session_id)) throw Error(ErrorCode::InvalidArgument, "invalid session id", session_id);
    return data_dir / (session_id + ".json");
}

void persist_session(const PersistedSession& persisted, const std::filesystem::path& data_dir,
                     const PersistHooks& hooks) {
    const auto target = session_path(data_dir, persisted.session.session_id);
    std::error_code ec;
    std::filesystem::create_directories(data_dir, ec);
    if (ec) throw Error(ErrorCode::StorageError, "cannot create data directory " + data_dir.string(), ec.message());
    auto temp = target;
    temp += ".tmp";
    write_all_synced(temp, serialize(persisted));
    if (hooks.before_rename) hooks.before_rename(temp);
    std::filesystem::rename(temp, target, ec);
    if (ec) throw Error(ErrorCode::StorageError, "cannot replace " + target.string(), ec.message());
}

PersistedSession load_session(const std::string& session_id, const std::filesystem::path& data_dir) {
    const auto path = session_path(data_dir, session_id);
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::NotFound, "no such session", session_id);
    return deserialize(read_file(path));
}

void remove_session(const std::string& session_id, const std::filesystem::path& data_dir) {
    const auto path = session_path(data_dir, session_id);
    std::error_code ec;
    std::filesystem::remove(path, ec);
    auto temp = path;
    temp += ".tmp";
    std::filesystem::remove(temp, ec);
}

std::vector<std::string> list_session_ids(const std::filesystem::path& data_dir) {
    std::vector<std::string> ids;
    std::error_code ec;
    if (!std::filesystem::is_directory(data_dir, ec)) return ids;
    for (const auto& entry : std::filesystem::directory_iterator(data_dir)) {
        const auto& p = entry.path();
        if (entry.is_regular_file() && p.extension() == ".json" && valid_session_id(p.stem().string())) {
            ids.push_back(p.stem().string());
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace docape
