#include "docape/backend.hpp"

#include "docape/error.hpp"
#include "docape/prompts.hpp"

#include <cmath>

namespace docape {

std::string CompletionRequest::full_prompt() const { return compose_prompt(prompt, forced_prefix); }

std::string_view to_string(FinishReason reason) {
    switch (reason) {
        case FinishReason::Stop: return "stop";
        case FinishReason::Length: return "length";
        case FinishReason::Error: return "error";
    }
    return "error";
}

std::string_view to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::Completion: return "completion";
        case BackendKind::Translation: return "translation";
        case BackendKind::Embedding: return "embedding";
    }
    return "completion";
}

BackendKind backend_kind_from(std::string_view name) {
    if (name == "completion") return BackendKind::Completion;
    if (name == "translation") return BackendKind::Translation;
    if (name == "embedding") return BackendKind::Embedding;
    throw Error(ErrorCode::InvalidArgument, "unknown backend kind", std::string(name));
}

std::vector<TokenLogprob> CompletionBackend::echo_logprobs(const std::string&) {
    throw Error(ErrorCode::UnsupportedCapability, "backend cannot echo prompt logprobs");
}

Sentence translate(TranslationBackend& backend, const Sentence& sentence) {
    if (trim(sentence.text).empty()) throw Error(ErrorCode::EmptyField, "cannot translate an empty sentence");
    return Sentence::from(backend.translate_text(sentence.text));
}

double continuation_logprob(const std::vector<TokenLogprob>& tokens, std::size_t boundary) {
    double total = 0.0;
    for (const auto& t : tokens) {
        if (t.offset + t.token.size() > boundary && t.logprob) total += *t.logprob;
    }
    return total;
}

double score_continuation(CompletionBackend& backend, const std::string& prompt, const std::string& continuation) {
    if (continuation.empty()) throw Error(ErrorCode::EmptyContinuation, "continuation is empty");
    const std::string text = prompt + continuation;
    const auto tokens = backend.echo_logprobs(text);
    std::size_t last = 0;
    for (const auto& t : tokens) {
        if (t.offset < last || t.offset > text.size()) {
            throw Error(ErrorCode::ProtocolError, "echoed token offsets are not monotone within the text");
        }
        last = t.offset;
    }
    return continuation_logprob(tokens, prompt.size());
}

CompletionResult finalize_completion(std::string_view raw, const std::vector<std::string>& stops,
                                     std::optional<std::size_t> max_new_tokens) {
    std::size_t cut = std::string_view::npos;
    for (const auto& stop : stops) {
        if (stop.empty()) continue;
        const auto hit = raw.find(stop);
        if (hit != std::string_view::npos && (cut == std::string_view::npos || hit < cut)) cut = hit;
    }
    CompletionResult result;
    std::string_view kept = cut == std::string_view::npos ? raw : raw.substr(0, cut);
    result.finish_reason = FinishReason::Stop;
    if (max_new_tokens) {
        // Budget is measured on whitespace tokens of the kept text.
        std::size_t seen = 0;
        bool in_token = false;
        for (std::size_t i = 0; i < kept.size(); ++i) {
            const bool space = kept[i] == ' ' || kept[i] == '\t' || kept[i] == '\n' || kept[i] == '\r';
            if (!space && !in_token) {
                if (seen == *max_new_tokens) {
                    kept = kept.substr(0, i);
                    result.finish_reason = FinishReason::Length;
                    break;
                }
                ++seen;
            }
            in_token = !space;
        }
    }
    result.text = std::string(trim(kept));
    return result;
}

std::chrono::milliseconds RetryPolicy::delay_for(int attempt) const {
    const double scaled = static_cast<double>(base_delay.count()) * std::pow(factor, attempt);
    return std::chrono::milliseconds(static_cast<long long>(scaled));
}

}  // namespace docape
