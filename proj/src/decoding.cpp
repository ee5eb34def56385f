#include "docape/decoding.hpp"

#include "docape/error.hpp"
#include "docape/util.hpp"

#include <algorithm>
#include <map>
#include <thread>

namespace docape {

using nlohmann::json;

namespace {

void require_aligned(const Document& doc, const std::vector<std::string>& nmt_hyps) {
    if (nmt_hyps.size() != doc.size()) {
        throw Error(ErrorCode::LengthMismatch, "hypothesis count differs from document length", doc.doc_id);
    }
}

DocResult empty_result(const Document& doc) {
    DocResult result;
    result.doc_id = doc.doc_id;
    result.outputs.resize(doc.size());
    return result;
}

void count_fallbacks(DocResult& result) {
    result.fallback_count = static_cast<std::size_t>(std::count_if(
        result.outputs.begin(), result.outputs.end(),
        [](const SentenceOutput& o) { return o.provenance == Provenance::NMTFallback; }));
}

CompletionRequest make_request(const RenderedPrompt& prompt, const std::vector<std::string>& hyp_region,
                               double temperature) {
    CompletionRequest request;
    request.prompt = prompt.prompt_text;
    request.forced_prefix = prompt.forced_prefix;
    request.stop_sequences = prompt.stop_sequences;
    request.max_new_tokens = max_new_tokens_for(hyp_region);
    request.temperature = temperature;
    return request;
}

/// Model text as a sentence output; empty text is a failure.
std::optional<std::string> usable(std::string_view text) {
    auto cleaned = sanitize(text);
    if (cleaned.empty()) return std::nullopt;
    return cleaned;
}

}  // namespace

std::string_view to_string(Provenance provenance) {
    switch (provenance) {
        case Provenance::LLM: return "LLM";
        case Provenance::NMTFallback: return "NMTFallback";
        case Provenance::Human: return "Human";
    }
    return "LLM";
}

Provenance provenance_from(std::string_view name) {
    if (name == "LLM") return Provenance::LLM;
    if (name == "NMTFallback") return Provenance::NMTFallback;
    if (name == "Human") return Provenance::Human;
    throw Error(ErrorCode::InvalidArgument, "unknown provenance", std::string(name));
}

std::string_view to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::SentencePE: return "sentence";
        case StrategyKind::Chunked: return "chunked";
        case StrategyKind::BatchedSW: return "batched-sw";
        case StrategyKind::ContinuousSW: return "continuous-sw";
    }
    return "continuous-sw";
}

StrategyKind strategy_kind_from(std::string_view name) {
    if (name == "sentence") return StrategyKind::SentencePE;
    if (name == "chunked") return StrategyKind::Chunked;
    if (name == "batched-sw") return StrategyKind::BatchedSW;
    if (name == "continuous-sw") return StrategyKind::ContinuousSW;
    throw Error(ErrorCode::InvalidArgument, "unknown strategy", std::string(name));
}

std::vector<std::string> DocResult::texts() const {
    std::vector<std::string> out;
    out.reserve(outputs.size());
    for (const auto& o : outputs) out.push_back(o.text);
    return out;
}

json to_json(const DocResult& result) {
    json outputs = json::array();
    for (const auto& o : result.outputs) outputs.push_back({{"text", o.text}, {"provenance", to_string(o.provenance)}});
    json diagnostics = json::array();
    for (const auto& d : result.diagnostics) {
        json entry{{"start", d.range.start}, {"end", d.range.end}, {"fallback", d.fallback}, {"parts", d.parts},
                   {"response", d.response}};
        if (!d.error.empty()) entry["error"] = d.error;
        diagnostics.push_back(std::move(entry));
    }
    return json{{"doc_id", result.doc_id},
                {"outputs", std::move(outputs)},
                {"fallback_count", result.fallback_count},
                {"diagnostics", std::move(diagnostics)}};
}

std::size_t max_new_tokens_for(const std::vector<std::string>& hypothesis_region) {
    std::size_t tokens = 0;
    for (const auto& h : hypothesis_region) tokens += count_tokens(h);
    return 2 * tokens + 32;
}

DocResult sentence_ape(const Document& doc, const std::vector<std::string>& nmt_hyps, CompletionBackend& backend,
                       const DecodeOptions& options) {
    require_aligned(doc, nmt_hyps);
    auto result = empty_result(doc);
    result.diagnostics.resize(doc.size());
    parallel_for(doc.size(), options.parallelism, [&](std::size_t i) {
        auto& diag = result.diagnostics[i];
        diag.range = {i, i + 1};
        try {
            const auto prompt = options.sentence_prompt == SentencePrompt::ZeroShot
                                    ? render_zero_shot_pe(doc.sentences[i].text, nmt_hyps[i])
                                    : render_sent_ape(doc.sentences[i].text, nmt_hyps[i]);
            const auto completion = backend.complete(make_request(prompt, {nmt_hyps[i]}, options.temperature));
            diag.response = completion.text;
            if (auto text = usable(completion.text)) {
                diag.parts = {*text};
                result.outputs[i] = {*text, Provenance::LLM};
                return;
            }
            diag.error = "empty output";
        } catch (const Error& e) {
            diag.error = std::string(to_string(e.code())) + ": " + e.what();
        }
        diag.fallback = true;
        result.outputs[i] = {nmt_hyps[i], Provenance::NMTFallback};
    });
    count_fallbacks(result);
    return result;
}

DocResult decode_chunked(const Document& doc, const std::vector<std::string>& nmt_hyps, CompletionBackend& backend,
                         std::size_t limit, const DecodeOptions& options) {
    require_aligned(doc, nmt_hyps);
    auto result = empty_result(doc);
    const auto chunks = chunk_document(doc, limit);
    const auto sources = doc.texts();
    result.diagnostics.resize(chunks.size());
    parallel_for(chunks.size(), options.parallelism, [&](std::size_t c) {
        const auto range = chunks[c].range;
        auto& diag = result.diagnostics[c];
        diag.range = range;
        const auto hyps = slice(nmt_hyps, range);
        try {
            const auto prompt = render_doc_ape(slice(sources, range), hyps);
            const auto completion = backend.complete(make_request(prompt, hyps, options.temperature));
            diag.response = completion.text;
            auto parsed = parse_doc_response(completion.text, range.size());
            if (auto* parts = std::get_if<std::vector<std::string>>(&parsed)) {
                diag.parts = *parts;
                std::vector<std::string> cleaned;
                for (const auto& p : *parts) {
                    if (auto text = usable(p)) cleaned.push_back(*text);
                }
                if (cleaned.size() == range.size()) {
                    for (std::size_t k = 0; k < range.size(); ++k) {
                        result.outputs[range.start + k] = {cleaned[k], Provenance::LLM};
                    }
                    return;
                }
                diag.error = "empty sentence in chunk output";
            } else {
                const auto& report = std::get<MismatchReport>(parsed);
                diag.parts = report.parts;
                diag.error = "sentence count mismatch: expected " + std::to_string(report.expected) + ", got " +
                             std::to_string(report.got);
            }
        } catch (const Error& e) {
            diag.error = std::string(to_string(e.code())) + ": " + e.what();
        }
        // Whole-chunk replacement with the sentence-level hypotheses.
        diag.fallback = true;
        for (auto i = range.start; i < range.end; ++i) result.outputs[i] = {nmt_hyps[i], Provenance::NMTFallback};
    });
    count_fallbacks(result);
    return result;
}

DocResult decode_batched_sw(const Document& doc, const std::vector<std::string>& nmt_hyps, CompletionBackend& backend,
                            std::size_t limit, const DecodeOptions& options) {
    require_aligned(doc, nmt_hyps);
    auto result = empty_result(doc);
    const auto sources = doc.texts();
    const auto counts = doc.token_counts();
    result.diagnostics.resize(doc.size());
    parallel_for(doc.size(), options.parallelism, [&](std::size_t i) {
        const auto window = left_context_window(counts, i, limit);
        auto& diag = result.diagnostics[i];
        diag.range = window;
        const auto hyps = slice(nmt_hyps, window);
        try {
            const auto prompt = render_doc_ape(slice(sources, window), hyps);
            const auto completion = backend.complete(make_request(prompt, hyps, options.temperature));
            diag.response = completion.text;
            auto parsed = parse_doc_response(completion.text, window.size());
            if (auto* parts = std::get_if<std::vector<std::string>>(&parsed)) {
                diag.parts = *parts;
                if (auto text = usable(parts->back())) {
                    result.outputs[i] = {*text, Provenance::LLM};
                    return;
                }
                diag.error = "empty last sentence";
            } else {
                const auto& report = std::get<MismatchReport>(parsed);
                diag.parts = report.parts;
                diag.error = "sentence count mismatch: expected " + std::to_string(report.expected) + ", got " +
                             std::to_string(report.got);
            }
        } catch (const Error& e) {
            diag.error = std::string(to_string(e.code())) + ": " + e.what();
        }
        diag.fallback = true;
        result.outputs[i] = {nmt_hyps[i], Provenance::NMTFallback};
    });
    count_fallbacks(result);
    return result;
}

ContinuousDecoder::ContinuousDecoder(const Document& doc, const std::vector<std::string>& nmt_hyps,
                                     CompletionBackend& backend, std::size_t limit, double temperature)
    : doc_(doc), hyps_(nmt_hyps), backend_(backend), token_counts_(doc.token_counts()), limit_(limit),
      temperature_(temperature) {
    require_aligned(doc, nmt_hyps);
    if (limit == 0) throw Error(ErrorCode::InvalidArgument, "chunk limit must be positive");
}

CompletionRequest ContinuousDecoder::request_for(std::size_t i, const std::vector<std::string>& targets) const {
    if (i >= doc_.size()) throw Error(ErrorCode::IndexOutOfRange, "sentence index out of range");
    if (targets.size() < i) throw Error(ErrorCode::LengthMismatch, "missing finalized targets before the step");
    const auto window = left_context_window(token_counts_, i, limit_);
    std::vector<std::string> sources;
    for (auto k = window.start; k < window.end; ++k) sources.push_back(doc_.sentences[k].text);
    const auto hyps = slice(hyps_, window);
    const auto prefix = slice(targets, {window.start, i});
    const auto prompt = render_doc_ape(sources, hyps, prefix, std::nullopt, DocTarget::NextSentence);
    return make_request(prompt, hyps, temperature_);
}

ContinuousDecoder::Step ContinuousDecoder::step(std::size_t i, const std::vector<std::string>& targets) const {
    Step out;
    out.diagnostic.range = left_context_window(token_counts_, i, limit_);
    try {
        const auto completion = backend_.complete(request_for(i, targets));
        out.diagnostic.response = completion.text;
        if (auto text = usable(completion.text)) {
            out.diagnostic.parts = {*text};
            out.output = {*text, Provenance::LLM};
            return out;
        }
        out.diagnostic.error = "empty output";
    } catch (const Error& e) {
        out.diagnostic.error = std::string(to_string(e.code())) + ": " + e.what();
    }
    out.diagnostic.fallback = true;
    out.output = {hyps_[i], Provenance::NMTFallback};
    return out;
}

DocResult decode_continuous_sw(const Document& doc, const std::vector<std::string>& nmt_hyps,
                               CompletionBackend& backend, std::size_t limit, const ContinuousOptions& options) {
    require_aligned(doc, nmt_hyps);
    std::map<std::size_t, std::string> gold;
    for (const auto& [index, text] : options.gold_prefix) {
        if (index >= doc.size()) throw Error(ErrorCode::IndexOutOfRange, "gold prefix index out of range");
        gold[index] = text;
    }
    if (options.gold_context && options.gold_context->size() != doc.size()) {
        throw Error(ErrorCode::LengthMismatch, "gold context must cover every sentence", doc.doc_id);
    }

    ContinuousDecoder decoder(doc, nmt_hyps, backend, limit, options.temperature);
    auto result = empty_result(doc);
    std::vector<std::string> forced;
    forced.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        if (auto it = gold.find(i); it != gold.end()) {
            result.outputs[i] = {it->second, Provenance::Human};
        } else {
            auto step = decoder.step(i, forced);
            result.outputs[i] = std::move(step.output);
            result.diagnostics.push_back(std::move(step.diagnostic));
        }
        forced.push_back(options.gold_context ? (*options.gold_context)[i] : result.outputs[i].text);
    }
    count_fallbacks(result);
    return result;
}

DocResult decode(const Document& doc, const std::vector<std::string>& nmt_hyps, CompletionBackend& backend,
                 const Strategy& strategy, const DecodeOptions& options) {
    switch (strategy.kind) {
        case StrategyKind::SentencePE: return sentence_ape(doc, nmt_hyps, backend, options);
        case StrategyKind::Chunked: return decode_chunked(doc, nmt_hyps, backend, strategy.chunk_limit, options);
        case StrategyKind::BatchedSW: return decode_batched_sw(doc, nmt_hyps, backend, strategy.chunk_limit, options);
        case StrategyKind::ContinuousSW: {
            ContinuousOptions continuous;
            continuous.temperature = options.temperature;
            return decode_continuous_sw(doc, nmt_hyps, backend, strategy.chunk_limit, continuous);
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown strategy");
}

}  // namespace docape
