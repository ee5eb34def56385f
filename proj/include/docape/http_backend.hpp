#pragma once

#include "docape/backend.hpp"

#include <json.hpp>

#include <semaphore>
#include <string>

namespace docape {

/// Client for OpenAI-compatible servers (`/v1/completions`, `/v1/embeddings`).
/// Safe for concurrent use; in-flight requests are capped at the descriptor's limit.
class HttpBackend final : public CompletionBackend, public TranslationBackend, public EmbeddingBackend {
public:
    explicit HttpBackend(BackendDescriptor descriptor, RetryPolicy retry = {});

    CompletionResult complete(const CompletionRequest& request) override;
    std::vector<TokenLogprob> echo_logprobs(const std::string& text) override;
    std::string translate_text(const std::string& source) override;
    std::vector<double> embed(const std::string& text) override;

    const BackendDescriptor& descriptor() const { return descriptor_; }

    static nlohmann::json completion_body(const std::string& model, const CompletionRequest& request);
    static nlohmann::json echo_body(const std::string& model, const std::string& text);
    /// Parses `logprobs.{tokens, token_logprobs, text_offset}`; ProtocolError when inconsistent.
    static std::vector<TokenLogprob> parse_logprobs(const nlohmann::json& logprobs);

private:
    nlohmann::json post(const std::string& path, const nlohmann::json& body);

    BackendDescriptor descriptor_;
    RetryPolicy retry_;
    std::string scheme_host_port_;
    std::string path_prefix_;
    std::counting_semaphore<1024> in_flight_;
};

}  // namespace docape
