#pragma once

#include "docape/backend.hpp"
#include "docape/decoding.hpp"
#include "docape/text.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace docape {

enum class SentenceStatus { Machine, Human, Regenerating, Fallback };

std::string_view to_string(SentenceStatus status);
SentenceStatus sentence_status_from(std::string_view name);

/// Live manual post-editing state for one document.
struct Session {
    std::string session_id;
    Document doc;
    std::vector<std::string> nmt_hyps;
    std::vector<SentenceOutput> outputs;
    std::vector<SentenceStatus> status;
    Strategy strategy;
    /// Incremented exactly once per mutation (creation counts as the first).
    std::uint64_t revision = 0;
    std::string nmt_backend;
    std::string llm_backend;

    std::size_t size() const { return doc.size(); }
    bool settled() const;
    std::vector<std::string> output_texts() const;

    friend bool operator==(const Session&, const Session&) = default;
};

nlohmann::json to_json(const Session& session);
Session session_from_json(const nlohmann::json& j);

struct SessionBackends {
    TranslationBackend& nmt;
    CompletionBackend& llm;
    std::string nmt_name;
    std::string llm_name;
};

/// Session ids double as file names: [A-Za-z0-9_-], 1..128 chars.
bool valid_session_id(std::string_view id);

/// Translates every sentence, runs the initial decode with `strategy`. Revision 1.
/// BackendUnavailable when the translation backend fails.
Session create_session(std::string session_id, Document doc, Strategy strategy, const SessionBackends& backends,
                       const DecodeOptions& options = {});

/// Records a human edit and marks every later non-Human sentence Regenerating.
/// IndexOutOfRange / EmptyField on bad input; the revision is bumped once.
void mark_edit(Session& session, std::size_t index, const std::string& text);

/// First sentence waiting for regeneration.
std::optional<std::size_t> next_pending(const Session& session);

/// Regenerates sentence i with outputs [0, i) force-decoded. Does not modify the session.
ContinuousDecoder::Step regenerate_step(const Session& session, std::size_t i, CompletionBackend& llm);

/// Stores a regenerated output; Human sentences are never overwritten.
void commit_step(Session& session, std::size_t i, SentenceOutput output);

/// Regenerates pending sentences left to right until none remain or `cancelled()` turns true.
void settle(Session& session, CompletionBackend& llm, const std::function<bool()>& cancelled = {});

/// mark_edit followed by settle.
void apply_edit(Session& session, std::size_t index, const std::string& text, CompletionBackend& llm);

/// Character-level Levenshtein distance over Unicode code points.
std::size_t levenshtein(std::string_view a, std::string_view b);

struct EditEffort {
    std::vector<std::size_t> per_sentence;
    std::size_t total = 0;
};

EditEffort edit_effort(const std::vector<std::string>& outputs, const std::vector<std::string>& references);

}  // namespace docape
