#include "docape/prompts.hpp"

#include "docape/corpus_io.hpp"
#include "docape/error.hpp"
#include "docape/util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace docape {

namespace {

// Template literals. Golden tests in tests/unit/test_prompts.cpp freeze these bytes.
constexpr std::string_view kIclHeader = "### INSTRUCTION:\nTranslate the input from English to German.\n";
constexpr std::string_view kIclInput = "\n###Input: ";
constexpr std::string_view kIclResponse = "\n####Response:";

constexpr std::string_view kDirectMtHead =
    "[INST] <<SYS>>\nYou are a professional translator from English to German.\n\n"
    "The output should only be the translation in one line.<</SYS>>\n\nEnglish: ";
constexpr std::string_view kDirectMtTail = "\n[/INST]\nGerman:";

constexpr std::string_view kZeroShotHead =
    "[INST] <<SYS>>You are a post-editor.\n"
    "You improve translations from English to German using the English source and German translation. "
    "Do not provide any explanation or correction.\n"
    "The translation should end with ### in new line\n"
    "<</SYS>>\nEnglish: ";
constexpr std::string_view kZeroShotStop = "###";

constexpr std::string_view kSourceLabel = "English: ";
constexpr std::string_view kHypothesisLabel = "\nGerman Translation: ";

void require_text(std::string_view value, const char* field) {
    if (trim(value).empty()) throw Error(ErrorCode::EmptyField, std::string(field) + " is empty");
}

std::vector<std::string> inference_stops() { return {"\n", std::string(kEndOfText)}; }

/// "English: ...\nGerman Translation: ...\nPost-Edited Translation:"
std::string ape_body(std::string_view src, std::string_view hyp) {
    std::string text;
    text.reserve(src.size() + hyp.size() + 64);
    text.append(kSourceLabel).append(src).append(kHypothesisLabel).append(hyp).append("\n").append(kPostEditAnchor);
    return text;
}

}  // namespace

std::string_view to_string(PromptKind kind) {
    switch (kind) {
        case PromptKind::ICL: return "ICL";
        case PromptKind::DirectMT: return "DirectMT";
        case PromptKind::ZeroShotPE: return "ZeroShotPE";
        case PromptKind::SentAPE: return "SentAPE";
        case PromptKind::DocAPE: return "DocAPE";
    }
    return "Unknown";
}

std::string compose_prompt(std::string_view prompt, std::string_view forced_prefix) {
    std::string out(prompt);
    if (!forced_prefix.empty()) {
        out.push_back(' ');
        out.append(forced_prefix);
    }
    return out;
}

std::string RenderedPrompt::full_text() const { return compose_prompt(prompt_text, forced_prefix); }

RenderedPrompt render_sent_ape(std::string_view src, std::string_view hyp, const std::optional<std::string>& ref) {
    require_text(src, "source");
    require_text(hyp, "hypothesis");
    RenderedPrompt out;
    out.prompt_text = ape_body(src, hyp);
    out.mask_boundary = out.prompt_text.size();
    if (ref) {
        require_text(*ref, "reference");
        out.prompt_text.append(" ").append(*ref);
    }
    out.stop_sequences = inference_stops();
    return out;
}

RenderedPrompt render_doc_ape(const std::vector<std::string>& src_sents, const std::vector<std::string>& hyp_sents,
                              const std::vector<std::string>& target_prefix,
                              const std::optional<std::vector<std::string>>& ref_sents, DocTarget target) {
    if (src_sents.empty()) throw Error(ErrorCode::EmptyField, "document prompt needs at least one sentence");
    if (src_sents.size() != hyp_sents.size()) {
        throw Error(ErrorCode::LengthMismatch, "source and hypothesis sentence counts differ",
                    std::to_string(src_sents.size()) + " vs " + std::to_string(hyp_sents.size()));
    }
    if (target_prefix.size() >= src_sents.size()) {
        throw Error(ErrorCode::LengthMismatch, "forced target prefix must be shorter than the source window");
    }
    if (ref_sents && ref_sents->size() != src_sents.size()) {
        throw Error(ErrorCode::LengthMismatch, "reference sentence count differs from source");
    }
    if (ref_sents && !target_prefix.empty()) {
        throw Error(ErrorCode::InvalidArgument, "training prompts take no forced prefix");
    }
    for (const auto& s : src_sents) require_text(s, "source sentence");
    for (const auto& h : hyp_sents) require_text(h, "hypothesis sentence");

    RenderedPrompt out;
    out.prompt_text = ape_body(join_with_separator(src_sents), join_with_separator(hyp_sents));
    out.mask_boundary = out.prompt_text.size();
    if (ref_sents) out.prompt_text.append(" ").append(join_with_separator(*ref_sents));
    if (!target_prefix.empty()) {
        out.forced_prefix = join_with_separator(target_prefix);
        out.forced_prefix.append(" ").append(kSeparator);
    }
    out.stop_sequences = inference_stops();
    if (target == DocTarget::NextSentence) out.stop_sequences.insert(out.stop_sequences.begin(), std::string(kSeparator));
    return out;
}

RenderedPrompt render_icl(const std::vector<TranslationPair>& exemplars, std::string_view src) {
    if (exemplars.empty()) throw Error(ErrorCode::MissingExemplars, "ICL prompt needs at least one exemplar");
    require_text(src, "source");
    RenderedPrompt out;
    out.prompt_text.append(kIclHeader);
    for (const auto& ex : exemplars) {
        require_text(ex.source, "exemplar source");
        require_text(ex.target, "exemplar target");
        out.prompt_text.append(kIclInput).append(ex.source).append(kIclResponse).append(" ").append(ex.target).append("\n");
    }
    out.prompt_text.append(kIclInput).append(src).append(kIclResponse);
    out.mask_boundary = out.prompt_text.size();
    out.stop_sequences = {"\n", "###", std::string(kEndOfText)};
    return out;
}

RenderedPrompt render_direct_mt(std::string_view src) {
    require_text(src, "source");
    RenderedPrompt out;
    out.prompt_text.append(kDirectMtHead).append(src).append(kDirectMtTail);
    out.mask_boundary = out.prompt_text.size();
    out.stop_sequences = inference_stops();
    return out;
}

RenderedPrompt render_zero_shot_pe(std::string_view src, std::string_view hyp) {
    require_text(src, "source");
    require_text(hyp, "hypothesis");
    RenderedPrompt out;
    out.prompt_text.append(kZeroShotHead)
        .append(src)
        .append(kHypothesisLabel)
        .append(hyp)
        .append("\n[/INST]\n")
        .append(kPostEditAnchor);
    out.mask_boundary = out.prompt_text.size();
    out.stop_sequences = {std::string(kZeroShotStop)};
    return out;
}

RenderedPrompt render_baseline(PromptKind kind, const BaselineInputs& inputs) {
    switch (kind) {
        case PromptKind::ICL: return render_icl(inputs.exemplars, inputs.src);
        case PromptKind::DirectMT: return render_direct_mt(inputs.src);
        case PromptKind::ZeroShotPE: return render_zero_shot_pe(inputs.src, inputs.hyp);
        default: break;
    }
    throw Error(ErrorCode::InvalidArgument, "not a baseline prompt kind", std::string(to_string(kind)));
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "embedding dimensionality differs");
    const double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
    const double nb = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (na * nb);
}

std::vector<Exemplar> select_exemplars(const std::vector<Exemplar>& pool, const ExemplarQuery& query, std::size_t k,
                                       const SelectionMode& mode) {
    if (k > pool.size()) {
        throw Error(ErrorCode::InsufficientPool, "asked for more exemplars than the pool holds",
                    std::to_string(k) + " > " + std::to_string(pool.size()));
    }
    std::vector<std::size_t> picked;
    if (const auto* random = std::get_if<RandomSelection>(&mode)) {
        // Partial Fisher-Yates: the first k slots are a uniform sample without replacement.
        std::vector<std::size_t> order(pool.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937_64 rng(random->seed);
        for (std::size_t i = 0; i < k; ++i) std::swap(order[i], order[i + uniform_index(rng, pool.size() - i)]);
        picked.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
        if (!query.embedding) throw Error(ErrorCode::MissingEmbedding, "query has no embedding");
        std::vector<std::pair<double, std::size_t>> scored;
        scored.reserve(pool.size());
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (!pool[i].embedding) {
                throw Error(ErrorCode::MissingEmbedding, "pool item has no embedding", std::to_string(i));
            }
            scored.emplace_back(cosine_similarity(*query.embedding, *pool[i].embedding), i);
        }
        std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t i = 0; i < k; ++i) picked.push_back(scored[i].second);
    }
    std::vector<Exemplar> out;
    out.reserve(picked.size());
    for (auto i : picked) out.push_back(pool[i]);
    return out;
}

std::vector<Exemplar> load_exemplar_pool(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open exemplar pool", path);
    std::vector<Exemplar> pool;
    std::optional<std::size_t> dim;
    for_each_jsonl(in, [&](const nlohmann::json& record, std::size_t line_no) {
        try {
            Exemplar ex;
            ex.source = sanitize(record.at("source").get<std::string>());
            ex.target = sanitize(record.at("target").get<std::string>());
            if (record.contains("embedding") && !record.at("embedding").is_null()) {
                ex.embedding = record.at("embedding").get<std::vector<double>>();
                if (dim && *dim != ex.embedding->size()) {
                    throw Error(ErrorCode::ParseError, "embedding dimensionality differs at line " +
                                                           std::to_string(line_no), std::to_string(line_no));
                }
                dim = ex.embedding->size();
            }
            pool.push_back(std::move(ex));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError, "bad exemplar at line " + std::to_string(line_no) + ": " + e.what(),
                        std::to_string(line_no));
        }
    });
    return pool;
}

DocParse parse_doc_response(std::string_view text, std::size_t expected) {
    auto parts = split_on_separator(text);
    if (parts.size() == expected) return parts;
    return MismatchReport{expected, parts.size(), std::move(parts)};
}

}  // namespace docape
