#include "docape/config.hpp"

#include "docape/error.hpp"
#include "docape/http_backend.hpp"
#include "docape/scripted_backend.hpp"
#include "docape/util.hpp"

#include <toml.hpp>

#include <cstdlib>
#include <set>

namespace docape {

namespace {

constexpr std::string_view kScriptedScheme = "scripted:";

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
    return p.is_absolute() ? p : base / p;
}

}  // namespace

AppConfig parse_config(std::string_view toml_text, const std::filesystem::path& base_dir) {
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("config: ") + std::string(e.description()),
                    std::to_string(e.source().begin.line));
    }
    AppConfig config;
    config.base_dir = base_dir;
    config.port = static_cast<int>(root["port"].value_or<std::int64_t>(config.port));
    config.data_dir = resolve(base_dir, root["data_dir"].value_or<std::string>(config.data_dir.string()));
    if (auto lex = root["lexicons"].value<std::string>()) config.lexicons = resolve(base_dir, *lex);

    std::set<std::string> seen;
    if (auto* backends = root["backends"].as_array()) {
        for (auto& node : *backends) {
            auto* table = node.as_table();
            if (!table) throw Error(ErrorCode::ParseError, "config: [[backends]] entries must be tables");
            BackendDescriptor d;
            auto name = (*table)["name"].value<std::string>();
            auto endpoint = (*table)["endpoint"].value<std::string>();
            if (!name || name->empty()) throw Error(ErrorCode::ParseError, "config: backend without a name");
            if (!endpoint) throw Error(ErrorCode::ParseError, "config: backend without an endpoint", *name);
            if (!seen.insert(*name).second) throw Error(ErrorCode::ParseError, "config: duplicate backend name", *name);
            d.name = *name;
            d.kind = backend_kind_from((*table)["kind"].value_or<std::string>("completion"));
            d.endpoint = *endpoint;
            if (d.endpoint.starts_with(kScriptedScheme)) {
                d.endpoint = std::string(kScriptedScheme) +
                             resolve(base_dir, d.endpoint.substr(kScriptedScheme.size())).string();
            }
            d.model_id = (*table)["model_id"].value_or<std::string>("");
            d.timeout = std::chrono::milliseconds((*table)["timeout_ms"].value_or<std::int64_t>(60000));
            d.max_retries = static_cast<int>((*table)["max_retries"].value_or<std::int64_t>(3));
            d.max_in_flight = static_cast<std::size_t>((*table)["max_in_flight"].value_or<std::int64_t>(4));
            config.backends.push_back(std::move(d));
        }
    }
    return config;
}

AppConfig load_config(const std::filesystem::path& path) {
    const auto text = read_file(path);
    return parse_config(text, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

void apply_env_overrides(AppConfig& config) {
    if (const char* port = std::getenv("DOCAPE_PORT"); port && *port) {
        try {
            config.port = std::stoi(port);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "DOCAPE_PORT is not a number", port);
        }
    }
    if (const char* dir = std::getenv("DOCAPE_DATA_DIR"); dir && *dir) config.data_dir = dir;
}

BackendRegistry::BackendRegistry(const AppConfig& config) : base_dir_(config.base_dir) {
    for (const auto& d : config.backends) add(d);
}

void BackendRegistry::add(BackendDescriptor descriptor) {
    std::lock_guard lock(mutex_);
    auto name = descriptor.name;
    entries_[name] = Entry{std::move(descriptor), nullptr, nullptr, nullptr, nullptr};
}

void BackendRegistry::add(BackendDescriptor descriptor, std::shared_ptr<void> instance, CompletionBackend* completion,
                          TranslationBackend* translation, EmbeddingBackend* embedding) {
    std::lock_guard lock(mutex_);
    auto name = descriptor.name;
    entries_[name] = Entry{std::move(descriptor), std::move(instance), completion, translation, embedding};
}

bool BackendRegistry::contains(const std::string& name) const {
    std::lock_guard lock(mutex_);
    return entries_.count(name) > 0;
}

const BackendDescriptor& BackendRegistry::descriptor(const std::string& name) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(name);
    if (it == entries_.end()) throw Error(ErrorCode::BackendUnavailable, "unknown backend", name);
    return it->second.descriptor;
}

std::vector<BackendDescriptor> BackendRegistry::descriptors() const {
    std::lock_guard lock(mutex_);
    std::vector<BackendDescriptor> out;
    for (const auto& [name, entry] : entries_) out.push_back(entry.descriptor);
    return out;
}

BackendRegistry::Entry& BackendRegistry::instantiate(const std::string& name, BackendKind kind) {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(name);
    if (it == entries_.end()) throw Error(ErrorCode::BackendUnavailable, "unknown backend", name);
    auto& entry = it->second;
    if (entry.descriptor.kind != kind) {
        throw Error(ErrorCode::BackendUnavailable,
                    "backend " + name + " is a " + std::string(to_string(entry.descriptor.kind)) + " backend, not " +
                        std::string(to_string(kind)),
                    name);
    }
    if (!entry.instance) {
        const auto& endpoint = entry.descriptor.endpoint;
        if (endpoint.starts_with(kScriptedScheme)) {
            auto scripted = std::make_shared<ScriptedBackend>(
                ScriptedBackend::load(resolve(base_dir_, endpoint.substr(kScriptedScheme.size()))));
            entry.completion = scripted.get();
            entry.translation = scripted.get();
            entry.embedding = scripted.get();
            entry.instance = std::move(scripted);
        } else {
            auto http = std::make_shared<HttpBackend>(entry.descriptor);
            entry.completion = http.get();
            entry.translation = http.get();
            entry.embedding = http.get();
            entry.instance = std::move(http);
        }
    }
    return entry;
}

CompletionBackend& BackendRegistry::completion(const std::string& name) {
    auto& entry = instantiate(name, BackendKind::Completion);
    if (!entry.completion) throw Error(ErrorCode::BackendUnavailable, "backend has no completion interface", name);
    return *entry.completion;
}

TranslationBackend& BackendRegistry::translation(const std::string& name) {
    auto& entry = instantiate(name, BackendKind::Translation);
    if (!entry.translation) throw Error(ErrorCode::BackendUnavailable, "backend has no translation interface", name);
    return *entry.translation;
}

EmbeddingBackend& BackendRegistry::embedding(const std::string& name) {
    auto& entry = instantiate(name, BackendKind::Embedding);
    if (!entry.embedding) throw Error(ErrorCode::BackendUnavailable, "backend has no embedding interface", name);
    return *entry.embedding;
}

}  // namespace docape
