#pragma once

#include "docape/backend.hpp"
#include "docape/prompts.hpp"
#include "docape/text.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace docape {

enum class Provenance { LLM, NMTFallback, Human };

std::string_view to_string(Provenance provenance);
Provenance provenance_from(std::string_view name);

struct SentenceOutput {
    std::string text;
    Provenance provenance = Provenance::LLM;

    friend bool operator==(const SentenceOutput&, const SentenceOutput&) = default;
};

enum class StrategyKind { SentencePE, Chunked, BatchedSW, ContinuousSW };

struct Strategy {
    StrategyKind kind = StrategyKind::ContinuousSW;
    std::size_t chunk_limit = kInferenceChunkLimit;

    friend bool operator==(const Strategy&, const Strategy&) = default;
};

/// CLI / API names: sentence, chunked, batched-sw, continuous-sw.
std::string_view to_string(StrategyKind kind);
StrategyKind strategy_kind_from(std::string_view name);

/// One backend call: which sentences it covered and what came back.
struct StepDiagnostic {
    IndexRange range;
    std::string response;
    /// Parsed parts; for batched windows this keeps the discarded payload translations.
    std::vector<std::string> parts;
    std::string error;
    bool fallback = false;
};

struct DocResult {
    std::string doc_id;
    std::vector<SentenceOutput> outputs;
    std::size_t fallback_count = 0;
    std::vector<StepDiagnostic> diagnostics;

    std::vector<std::string> texts() const;
    /// Every sentence fell back: the backend contributed nothing.
    bool all_failed() const { return !outputs.empty() && fallback_count == outputs.size(); }
};

nlohmann::json to_json(const DocResult& result);

enum class SentencePrompt { FineTuned, ZeroShot };

struct DecodeOptions {
    /// Upper bound on concurrent backend calls for the parallel strategies.
    std::size_t parallelism = 1;
    double temperature = 0.0;
    SentencePrompt sentence_prompt = SentencePrompt::FineTuned;
};

/// Generation budget: 2 x whitespace tokens of the hypothesis region + 32.
std::size_t max_new_tokens_for(const std::vector<std::string>& hypothesis_region);

DocResult sentence_ape(const Document& doc, const std::vector<std::string>& nmt_hyps, CompletionBackend& backend,
                       const DecodeOptions& options = {});

DocResult decode_chunked(const Document& doc, const std::vector<std::string>& nmt_hyps, CompletionBackend& backend,
                         std::size_t limit = kInferenceChunkLimit, const DecodeOptions& options = {});

DocResult decode_batched_sw(const Document& doc, const std::vector<std::string>& nmt_hyps, CompletionBackend& backend,
                            std::size_t limit = kInferenceChunkLimit, const DecodeOptions& options = {});

struct ContinuousOptions {
    /// Human targets: replace the output at their index verbatim and are forced downstream.
    std::vector<std::pair<std::size_t, std::string>> gold_prefix;
    /// Reference targets forced as context for later sentences; the sentence itself is still generated.
    std::optional<std::vector<std::string>> gold_context;
    double temperature = 0.0;
};

DocResult decode_continuous_sw(const Document& doc, const std::vector<std::string>& nmt_hyps,
                               CompletionBackend& backend, std::size_t limit = kInferenceChunkLimit,
                               const ContinuousOptions& options = {});

DocResult decode(const Document& doc, const std::vector<std::string>& nmt_hyps, CompletionBackend& backend,
                 const Strategy& strategy, const DecodeOptions& options = {});

/// Single left-to-right step of the continuous sliding window: generates sentence i with the
/// targets of its window's preceding sentences force-decoded.
class ContinuousDecoder {
public:
    ContinuousDecoder(const Document& doc, const std::vector<std::string>& nmt_hyps, CompletionBackend& backend,
                      std::size_t limit, double temperature = 0.0);

    struct Step {
        SentenceOutput output;
        StepDiagnostic diagnostic;
    };

    /// `targets[k]` for k < i is the finalized (or forced) target of sentence k.
    Step step(std::size_t i, const std::vector<std::string>& targets) const;

    /// The request step(i, targets) sends; exposed for inspection.
    CompletionRequest request_for(std::size_t i, const std::vector<std::string>& targets) const;

private:
    const Document& doc_;
    const std::vector<std::string>& hyps_;
    CompletionBackend& backend_;
    std::vector<std::size_t> token_counts_;
    std::size_t limit_;
    double temperature_;
};

}  // namespace docape
