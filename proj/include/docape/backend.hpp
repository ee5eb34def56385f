#pragma once

#include "docape/text.hpp"

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace docape {

struct CompletionRequest {
    std::string prompt;
    /// Sent as part of the prompt text (prefix continuation), never regenerated.
    std::string forced_prefix;
    std::size_t max_new_tokens = 256;
    std::vector<std::string> stop_sequences;
    double temperature = 0.0;
    bool want_logprobs = false;

    std::string full_prompt() const;
};

struct TokenLogprob {
    std::string token;
    /// Servers report no logprob for the first echoed token.
    std::optional<double> logprob;
    std::size_t offset = 0;
};

enum class FinishReason { Stop, Length, Error };

std::string_view to_string(FinishReason reason);

struct CompletionResult {
    std::string text;
    std::optional<std::vector<TokenLogprob>> token_logprobs;
    FinishReason finish_reason = FinishReason::Stop;
};

enum class BackendKind { Completion, Translation, Embedding };

std::string_view to_string(BackendKind kind);
BackendKind backend_kind_from(std::string_view name);

struct BackendDescriptor {
    std::string name;
    BackendKind kind = BackendKind::Completion;
    /// `http://host:port[/prefix]` or `scripted:<path>`.
    std::string endpoint;
    std::string model_id;
    std::chrono::milliseconds timeout{60000};
    int max_retries = 3;
    std::size_t max_in_flight = 4;
};

class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;

    virtual CompletionResult complete(const CompletionRequest& request) = 0;

    /// Log-probabilities for every token of `text` with character offsets into it.
    /// Backends without echo support throw UnsupportedCapability.
    virtual std::vector<TokenLogprob> echo_logprobs(const std::string& text);
};

class TranslationBackend {
public:
    virtual ~TranslationBackend() = default;
    virtual std::string translate_text(const std::string& source) = 0;
};

class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual std::vector<double> embed(const std::string& text) = 0;
};

/// Translates one sentence; the output goes through the ingest sanitation rules.
Sentence translate(TranslationBackend& backend, const Sentence& sentence);

/// Total log-probability of `continuation` given `prompt`, using echoed token offsets.
/// Tokens straddling the boundary count toward the continuation.
double score_continuation(CompletionBackend& backend, const std::string& prompt, const std::string& continuation);

/// Sums the logprobs of tokens ending past `boundary`.
double continuation_logprob(const std::vector<TokenLogprob>& tokens, std::size_t boundary);

/// Cuts `raw` at the earliest stop sequence and trims it. `max_new_tokens` applies to the
/// whitespace-token length of the untruncated output.
CompletionResult finalize_completion(std::string_view raw, const std::vector<std::string>& stops,
                                     std::optional<std::size_t> max_new_tokens = std::nullopt);

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds base_delay{250};
    double factor = 4.0;
    /// Injected so tests can record delays instead of sleeping.
    std::function<void(std::chrono::milliseconds)> sleep;

    std::chrono::milliseconds delay_for(int attempt) const;
};

/// Runs `fn`, retrying transient errors (Timeout, ProtocolError, RemoteError) with exponential backoff.
template <typename Fn>
auto with_retries(const RetryPolicy& policy, Fn&& fn) -> decltype(fn());

}  // namespace docape

#include "docape/backend_retry.inl"
