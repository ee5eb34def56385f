#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace docape {

/// Literal joining sentences inside document-level prompts and model outputs.
inline constexpr std::string_view kSeparator = "<SS>";
inline constexpr std::string_view kSeparatorJoin = " <SS> ";
/// Replacement for separator literals found in ingested text.
inline constexpr std::string_view kSanitizedSeparator = "< SS >";

inline constexpr std::size_t kInferenceChunkLimit = 256;
inline constexpr std::size_t kTrainingChunkLimit = 1024;

std::size_t count_tokens(std::string_view text);

/// Collapses newlines to spaces, defuses separator literals and trims.
std::string sanitize(std::string_view text);

std::string_view trim(std::string_view text);

struct Sentence {
    std::string text;
    std::size_t token_count = 0;

    /// Builds a sentence from raw text, applying the ingest sanitation rules.
    static Sentence from(std::string_view raw);

    friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Document {
    std::string doc_id;
    std::vector<Sentence> sentences;

    std::size_t size() const { return sentences.size(); }
    std::vector<std::string> texts() const;
    std::vector<std::size_t> token_counts() const;

    friend bool operator==(const Document&, const Document&) = default;
};

/// Throws EmptyField on an empty id or an empty sentence list.
Document make_document(std::string doc_id, const std::vector<std::string>& sentences);

/// Half-open sentence index interval.
struct IndexRange {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - start; }
    bool contains(std::size_t i) const { return i >= start && i < end; }
    friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct Chunk {
    std::string doc_id;
    IndexRange range;
    std::size_t source_tokens = 0;

    friend bool operator==(const Chunk&, const Chunk&) = default;
};

/// Greedy left-to-right packing of sentences under a source-token budget.
/// A sentence longer than `limit` gets a chunk of its own.
std::vector<IndexRange> chunk_token_counts(std::span<const std::size_t> token_counts, std::size_t limit);
std::vector<Chunk> chunk_document(const Document& doc, std::size_t limit);

/// Largest window [j, i+1) whose token sum fits in `limit`; [i, i+1) when sentence i alone does not fit.
IndexRange left_context_window(std::span<const std::size_t> token_counts, std::size_t i, std::size_t limit);
IndexRange left_context_window(const Document& doc, std::size_t i, std::size_t limit);

std::vector<std::string> split_on_separator(std::string_view text, std::string_view separator = kSeparator);
std::string join_with_separator(std::span<const std::string> parts);

template <typename T>
std::vector<T> slice(const std::vector<T>& items, IndexRange range) {
    return std::vector<T>(items.begin() + static_cast<std::ptrdiff_t>(range.start),
                          items.begin() + static_cast<std::ptrdiff_t>(range.end));
}

}  // namespace docape
