#pragma once

#include "docape/backend.hpp"
#include "docape/corpus_io.hpp"
#include "docape/prompts.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace docape {

struct Triple {
    std::string doc_id;
    std::size_t index = 0;
    std::string source;
    std::string hypothesis;
    std::string reference;

    friend bool operator==(const Triple&, const Triple&) = default;
};

struct CorpusHalves {
    std::vector<ParallelDocument> a;
    std::vector<ParallelDocument> b;
};

/// Seeded document-level split; half A gets the extra document when the count is odd.
/// Documents keep their corpus order inside each half. TooSmall below two documents.
CorpusHalves partition_corpus(const std::vector<ParallelDocument>& corpus, std::uint64_t seed);

struct DroppedTriple {
    std::string doc_id;
    std::size_t index = 0;
    std::string error;
};

struct CrossTranslation {
    std::vector<Triple> triples;
    std::vector<DroppedTriple> dropped;
};

struct CrossOptions {
    /// Extra attempts per sentence before it is reported as dropped.
    int retries = 1;
    std::size_t parallelism = 1;
};

/// Half B is translated by the model trained on A and vice versa. Failed sentences are
/// listed in `dropped`, never silently lost.
CrossTranslation cross_translate(const std::vector<ParallelDocument>& half_a, const std::vector<ParallelDocument>& half_b,
                                 TranslationBackend& trained_on_a, TranslationBackend& trained_on_b,
                                 const CrossOptions& options = {});

enum class ExportKind { SentAPE, DocAPE };

ExportKind export_kind_from(std::string_view name);

struct TrainingRecord {
    std::string doc_id;
    IndexRange range;
    /// Masked part: everything up to and including the anchor.
    std::string prompt;
    /// Trainable part, starting right after the anchor.
    std::string completion;
    /// Byte offset of the completion in prompt + completion (== prompt.size()).
    std::size_t mask_boundary = 0;
};

/// Formats triples as prompt/completion pairs. DocAPE groups by doc_id (first-appearance order),
/// sorts by index and chunks under `chunk_limit` source tokens without crossing documents.
std::vector<TrainingRecord> export_training_examples(const std::vector<Triple>& triples, ExportKind kind,
                                                     std::size_t chunk_limit = kTrainingChunkLimit);

/// `{doc_id, start, end, prompt, completion, mask_boundary, mask_anchor}`; mask_boundary counts code points.
nlohmann::json to_json(const TrainingRecord& record);

void write_triples(std::ostream& out, const std::vector<Triple>& triples);
std::vector<Triple> read_triples(std::istream& in);

}  // namespace docape
