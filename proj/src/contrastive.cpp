#include "docape/contrastive.hpp"

#include "docape/corpus_io.hpp"
#include "docape/error.hpp"
#include "docape/prompts.hpp"
#include "docape/util.hpp"

#include <set>

namespace docape {

using nlohmann::json;

void validate(const ContrastiveInstance& instance) {
    if (instance.candidates.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two candidates");
    if (instance.correct_index >= instance.candidates.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "correct_index outside the candidate list");
    }
    if (std::set<std::string>(instance.candidates.begin(), instance.candidates.end()).size() !=
        instance.candidates.size()) {
        throw Error(ErrorCode::InvalidArgument, "candidates must differ");
    }
    if (instance.tgt_context_hyps && instance.tgt_context_hyps->size() != instance.src_context.size()) {
        throw Error(ErrorCode::LengthMismatch, "tgt_context_hyps must align with src_context");
    }
    if (trim(instance.src).empty()) throw Error(ErrorCode::EmptyField, "source sentence is empty");
}

std::size_t argmax_first(const std::vector<double>& scores) {
    if (scores.empty()) throw Error(ErrorCode::InvalidArgument, "argmax over no scores");
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
    }
    return best;
}

InstanceScore score_instance(const ContrastiveInstance& instance, TranslationBackend* translation,
                             CompletionBackend& completion, std::size_t ctx_size) {
    validate(instance);
    auto translate_or_fail = [&](const std::string& text) {
        if (!translation) throw Error(ErrorCode::BackendUnavailable, "a translation backend is required");
        try {
            return translate(*translation, Sentence::from(text)).text;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::EmptyField) throw;
            throw Error(ErrorCode::BackendUnavailable, std::string("translation failed: ") + e.what());
        }
    };

    const std::size_t used = std::min(ctx_size, instance.src_context.size());
    const std::size_t first = instance.src_context.size() - used;
    std::vector<std::string> sources, hyps;
    for (std::size_t k = first; k < instance.src_context.size(); ++k) {
        sources.push_back(sanitize(instance.src_context[k]));
        hyps.push_back(instance.tgt_context_hyps ? sanitize((*instance.tgt_context_hyps)[k])
                                                 : translate_or_fail(instance.src_context[k]));
    }
    const std::vector<std::string> context_targets = hyps;
    sources.push_back(sanitize(instance.src));
    hyps.push_back(instance.src_hyp ? sanitize(*instance.src_hyp) : translate_or_fail(instance.src));

    const auto prompt = render_doc_ape(sources, hyps);
    InstanceScore out;
    out.prompt = prompt.prompt_text;
    for (const auto& candidate : instance.candidates) {
        auto region = context_targets;
        region.push_back(sanitize(candidate));
        out.scores.push_back(score_continuation(completion, prompt.prompt_text, " " + join_with_separator(region)));
    }
    out.chosen = argmax_first(out.scores);
    return out;
}

BenchmarkResult run_benchmark(const std::vector<ContrastiveInstance>& instances, TranslationBackend* translation,
                              CompletionBackend& completion, std::size_t ctx_size, std::size_t parallelism) {
    if (instances.empty()) throw Error(ErrorCode::EmptyBenchmark, "no contrastive instances");
    BenchmarkResult result;
    result.log.resize(instances.size());
    parallel_for(instances.size(), parallelism, [&](std::size_t i) {
        result.log[i] = score_instance(instances[i], translation, completion, ctx_size);
    });
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (result.log[i].chosen == instances[i].correct_index) ++result.correct;
    }
    result.accuracy = static_cast<double>(result.correct) / static_cast<double>(instances.size());
    return result;
}

std::vector<ContrastiveInstance> read_instances(std::istream& in) {
    std::vector<ContrastiveInstance> out;
    for_each_jsonl(in, [&](const json& r, std::size_t line_no) {
        try {
            ContrastiveInstance inst;
            inst.src_context = r.value("src_context", std::vector<std::string>{});
            if (r.contains("tgt_context_hyps") && !r.at("tgt_context_hyps").is_null()) {
                inst.tgt_context_hyps = r.at("tgt_context_hyps").get<std::vector<std::string>>();
            }
            inst.src = r.at("src").get<std::string>();
            if (r.contains("src_hyp") && !r.at("src_hyp").is_null()) inst.src_hyp = r.at("src_hyp").get<std::string>();
            inst.candidates = r.at("candidates").get<std::vector<std::string>>();
            inst.correct_index = r.at("correct_index").get<std::size_t>();
            validate(inst);
            out.push_back(std::move(inst));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, "bad instance at line " + std::to_string(line_no) + ": " + e.what(),
                        std::to_string(line_no));
        } catch (const Error& e) {
            throw Error(ErrorCode::ParseError, "bad instance at line " + std::to_string(line_no) + ": " + e.what(),
                        std::to_string(line_no));
        }
    });
    return out;
}

json to_json(const BenchmarkResult& result, const std::vector<ContrastiveInstance>& instances) {
    json log = json::array();
    for (std::size_t i = 0; i < result.log.size(); ++i) {
        log.push_back({{"index", i},
                       {"chosen", result.log[i].chosen},
                       {"correct_index", i < instances.size() ? instances[i].correct_index : 0},
                       {"scores", result.log[i].scores}});
    }
    return json{{"accuracy", result.accuracy},
                {"correct", result.correct},
                {"total", result.log.size()},
                {"instances", std::move(log)}};
}

}  // namespace docape
