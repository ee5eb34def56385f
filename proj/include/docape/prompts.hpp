#pragma once

#include "docape/text.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace docape {

enum class PromptKind { ICL, DirectMT, ZeroShotPE, SentAPE, DocAPE };

std::string_view to_string(PromptKind kind);

/// Marker after which the post-edited translation starts; training masks everything before it.
inline constexpr std::string_view kPostEditAnchor = "Post-Edited Translation:";
/// Llama-2 end-of-sequence literal used as the end-of-text stop.
inline constexpr std::string_view kEndOfText = "</s>";

struct RenderedPrompt {
    std::string prompt_text;
    /// Target text the model must continue from rather than generate.
    std::string forced_prefix;
    std::vector<std::string> stop_sequences;
    /// Byte offset into full_text() where the trainable completion begins.
    std::size_t mask_boundary = 0;

    std::string full_text() const;
};

/// Joins prompt and forced prefix the way every backend sees them: a single space
/// separates the anchor from a non-empty prefix.
std::string compose_prompt(std::string_view prompt, std::string_view forced_prefix);

RenderedPrompt render_sent_ape(std::string_view src, std::string_view hyp,
                               const std::optional<std::string>& ref = std::nullopt);

/// How much of a document prompt the model is asked to produce.
enum class DocTarget {
    Chunk,         ///< every remaining sentence; stops at newline / end of text
    NextSentence,  ///< one sentence; also stops at the separator
};

RenderedPrompt render_doc_ape(const std::vector<std::string>& src_sents, const std::vector<std::string>& hyp_sents,
                              const std::vector<std::string>& target_prefix = {},
                              const std::optional<std::vector<std::string>>& ref_sents = std::nullopt,
                              DocTarget target = DocTarget::Chunk);

struct TranslationPair {
    std::string source;
    std::string target;
};

RenderedPrompt render_icl(const std::vector<TranslationPair>& exemplars, std::string_view src);
RenderedPrompt render_direct_mt(std::string_view src);
RenderedPrompt render_zero_shot_pe(std::string_view src, std::string_view hyp);

struct BaselineInputs {
    std::string src;
    std::string hyp;
    std::vector<TranslationPair> exemplars;
};

/// Dispatches to the ICL / DirectMT / ZeroShotPE renderers.
RenderedPrompt render_baseline(PromptKind kind, const BaselineInputs& inputs);

struct Exemplar {
    std::string source;
    std::string target;
    std::optional<std::vector<double>> embedding;
};

struct ExemplarQuery {
    std::string source;
    std::optional<std::vector<double>> embedding;
};

struct RandomSelection {
    std::uint64_t seed = 0;
};
struct SimilaritySelection {};
using SelectionMode = std::variant<RandomSelection, SimilaritySelection>;

std::vector<Exemplar> select_exemplars(const std::vector<Exemplar>& pool, const ExemplarQuery& query, std::size_t k,
                                       const SelectionMode& mode);

/// Record-per-line `{source, target, embedding?}`.
std::vector<Exemplar> load_exemplar_pool(const std::string& path);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

struct MismatchReport {
    std::size_t expected = 0;
    std::size_t got = 0;
    std::vector<std::string> parts;
};

using DocParse = std::variant<std::vector<std::string>, MismatchReport>;

DocParse parse_doc_response(std::string_view text, std::size_t expected);

}  // namespace docape
