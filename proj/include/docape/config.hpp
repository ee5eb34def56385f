#pragma once

#include "docape/backend.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace docape {

/// Contents of the shared TOML config:
///
///   port = 8080
///   data_dir = "sessions"
///   lexicons = "lexicons.toml"      # optional tagger lexicons
///
///   [[backends]]
///   name = "llm"
///   kind = "completion"               # completion | translation | embedding
///   endpoint = "http://127.0.0.1:8000" # or "scripted:fixtures/llm.jsonl"
///   model_id = "llama-2-13b-ape"
///   timeout_ms = 60000
///   max_retries = 3
///   max_in_flight = 4
struct AppConfig {
    std::vector<BackendDescriptor> backends;
    std::filesystem::path data_dir = "sessions";
    int port = 8080;
    std::optional<std::filesystem::path> lexicons;
    /// Directory of the config file; relative paths resolve against it.
    std::filesystem::path base_dir = ".";
};

AppConfig load_config(const std::filesystem::path& path);
AppConfig parse_config(std::string_view toml_text, const std::filesystem::path& base_dir = ".");

/// Applies DOCAPE_PORT / DOCAPE_DATA_DIR when set.
void apply_env_overrides(AppConfig& config);

/// Instantiates backends lazily by name. Scripted endpoints load their fixture on first use.
class BackendRegistry {
public:
    BackendRegistry() = default;
    explicit BackendRegistry(const AppConfig& config);

    void add(BackendDescriptor descriptor);
    /// Registers an already-built backend (tests, embedding in other programs).
    void add(BackendDescriptor descriptor, std::shared_ptr<void> instance, CompletionBackend* completion,
             TranslationBackend* translation, EmbeddingBackend* embedding);

    bool contains(const std::string& name) const;
    const BackendDescriptor& descriptor(const std::string& name) const;
    std::vector<BackendDescriptor> descriptors() const;

    /// BackendUnavailable when unknown or of the wrong kind.
    CompletionBackend& completion(const std::string& name);
    TranslationBackend& translation(const std::string& name);
    EmbeddingBackend& embedding(const std::string& name);

private:
    struct Entry {
        BackendDescriptor descriptor;
        std::shared_ptr<void> instance;
        CompletionBackend* completion = nullptr;
        TranslationBackend* translation = nullptr;
        EmbeddingBackend* embedding = nullptr;
    };
    Entry& instantiate(const std::string& name, BackendKind kind);

    std::filesystem::path base_dir_ = ".";
    std::map<std::string, Entry> entries_;
    mutable std::mutex mutex_;
};

}  // namespace docape
