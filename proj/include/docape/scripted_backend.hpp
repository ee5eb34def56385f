#pragma once

#include "docape/backend.hpp"

#include <filesystem>
#include <istream>
#include <map>
#include <mutex>
#include <regex>
#include <string>
#include <vector>

namespace docape {

/// Deterministic backend driven by a fixture file, one JSON record per line:
///
///   {"digest": "<sha256 of prompt+forced prefix>", "response": "...", "finish_reason"?: "length"}
///   {"prompt": "<literal full prompt>", "response": "..."}        digest computed at load
///   {"rule": "<regex>", "response": "<replacement>", "when_prefix"?: "<regex>", "when_prompt"?: "<regex>"}
///   {"fail": "<regex>"}                                          matching prompts raise RemoteError
///   {"logprobs": {"<token>": -0.5, ...}, "default_logprob"?: -1.0}
///   {"translate": {"<word>": "<word>", ...}, "prefix"?: "<marker>", "fail_source"?: "<regex>"}
///   {"embed": "<text>", "vector": [..]}
///
/// Digest entries answer exactly one prompt. Rules rewrite the hypothesis region (the text after
/// the last "German Translation: " label) in file order; with a forced prefix of m sentences the
/// first m rewritten parts are dropped so generation continues after the prefix.
class ScriptedBackend final : public CompletionBackend, public TranslationBackend, public EmbeddingBackend {
public:
    static ScriptedBackend load(const std::filesystem::path& path);
    static ScriptedBackend parse(std::istream& in);

    ScriptedBackend() = default;
    ScriptedBackend(ScriptedBackend&& other) noexcept;
    ScriptedBackend& operator=(ScriptedBackend&& other) noexcept;

    CompletionResult complete(const CompletionRequest& request) override;
    std::vector<TokenLogprob> echo_logprobs(const std::string& text) override;
    std::string translate_text(const std::string& source) override;
    std::vector<double> embed(const std::string& text) override;

    void add_response(const std::string& full_prompt, std::string response);
    void add_rule(const std::string& pattern, std::string replacement, std::string when_prefix = {},
                  std::string when_prompt = {});
    void set_logprob(const std::string& token, double logprob);
    void set_default_logprob(double logprob);
    void add_translation(const std::string& word, std::string target);
    void set_translation_prefix(std::string prefix);

    std::size_t call_count() const;

    /// Splits text into echo tokens: leading whitespace stays attached to the following word.
    static std::vector<std::pair<std::string, std::size_t>> echo_tokens(std::string_view text);

private:
    struct Rule {
        std::string pattern_text;
        std::regex pattern;
        std::string replacement;
        std::optional<std::regex> when_prefix;
        std::optional<std::regex> when_prompt;
    };
    struct Scripted {
        std::string response;
        FinishReason finish = FinishReason::Stop;
    };

    std::optional<std::string> apply_rules(const CompletionRequest& request) const;

    std::map<std::string, Scripted> by_digest_;
    std::vector<Rule> rules_;
    std::vector<std::regex> failures_;
    std::map<std::string, double> logprobs_;
    double default_logprob_ = -1.0;
    bool has_logprob_table_ = false;
    std::map<std::string, std::string> dictionary_;
    std::string translation_prefix_;
    std::vector<std::regex> translation_failures_;
    std::map<std::string, std::vector<double>> embeddings_;

    mutable std::mutex mutex_;
    std::size_t calls_ = 0;
};

}  // namespace docape
