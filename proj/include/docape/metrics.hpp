#pragma once

#include "docape/tagger.hpp"

#include <json.hpp>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace docape {

enum class BleuSmoothing { None, AddOne };

/// Whitespace tokens after splitting off each of . , ! ? ; : " ( ) as its own token.
std::vector<std::string> bleu_tokenize(std::string_view text);

/// Pooled n-gram statistics for BLEU-4; `add` merges corpora.
struct BleuStats {
    std::array<std::size_t, 4> matches{};
    std::array<std::size_t, 4> totals{};
    std::size_t hyp_length = 0;
    std::size_t ref_length = 0;

    void add(const BleuStats& other);
};

BleuStats bleu_sentence_stats(std::string_view hyp, std::string_view ref);
double bleu_from_stats(const BleuStats& stats, BleuSmoothing smoothing = BleuSmoothing::None);

/// Corpus BLEU-4 in [0, 100]. LengthMismatch / EmptyCorpus on bad input.
double corpus_bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                   BleuSmoothing smoothing = BleuSmoothing::None);

/// Corpus chrF with beta 2 over character 1..6-grams (whitespace removed), in [0, 100].
double chrf2(const std::vector<std::string>& hyps, const std::vector<std::string>& refs);

struct PrfScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t matched = 0;
    std::size_t hyp_tags = 0;
    std::size_t ref_tags = 0;
};

double harmonic_mean(double p, double r);

/// Per-phenomenon precision/recall/F1 from per-sentence multiset intersections of surfaces.
std::map<Phenomenon, PrfScore> tag_prf(const std::vector<TagSpan>& hyp_tags, const std::vector<TagSpan>& ref_tags);

struct MetricReport {
    double bleu = 0.0;
    double chrf2 = 0.0;
    std::map<Phenomenon, PrfScore> tags;
    std::size_t sentences = 0;
    std::size_t hyp_tokens = 0;
    std::size_t ref_tokens = 0;
    /// Externally computed COMET, passed through untouched.
    std::optional<double> comet;
};

struct EvalInputs {
    std::vector<Document> hyps;
    std::vector<Document> refs;
    /// Needed by the pronoun rule; may be empty.
    std::vector<Document> sources;
};

/// BLEU and ChrF2 over all sentences; tags computed per document pair.
MetricReport evaluate(const EvalInputs& inputs, const TagLexicons& lexicons,
                      BleuSmoothing smoothing = BleuSmoothing::None);

nlohmann::json to_json(const MetricReport& report);

}  // namespace docape
