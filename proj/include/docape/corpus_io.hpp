#pragma once

#include "docape/text.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace docape {

enum class CorpusFormat { PlainText, Jsonl };

/// `.jsonl` / `.json` select records, anything else is one sentence per line.
CorpusFormat detect_format(const std::filesystem::path& path);

/// One sentence per line; a blank line closes a document. Ids are `<prefix>-<k>`.
std::vector<Document> read_plain_corpus(std::istream& in, const std::string& id_prefix = "doc");
/// One `{doc_id, sentences: [string]}` record per line.
std::vector<Document> read_jsonl_corpus(std::istream& in);

std::vector<Document> read_corpus(const std::filesystem::path& path);
void write_corpus(const std::filesystem::path& path, const std::vector<Document>& docs);
void write_plain_corpus(std::ostream& out, const std::vector<Document>& docs);
void write_jsonl_corpus(std::ostream& out, const std::vector<Document>& docs);

/// Calls `fn(record, line_number)` for every non-blank line; malformed JSON raises ParseError with the line.
void for_each_jsonl(std::istream& in, const std::function<void(const nlohmann::json&, std::size_t)>& fn);

/// Source document paired with its sentence-aligned reference translation.
struct ParallelDocument {
    Document source;
    Document reference;

    const std::string& doc_id() const { return source.doc_id; }
    std::size_t size() const { return source.size(); }
};

/// Pairs documents by position; ids and sentence counts must agree (LengthMismatch otherwise).
std::vector<ParallelDocument> align_parallel(std::vector<Document> sources, std::vector<Document> references);

/// Hypothesis texts aligned to `docs`, checked per document.
std::vector<std::vector<std::string>> hypotheses_for(const std::vector<Document>& docs,
                                                     const std::vector<Document>& hyps);

}  // namespace docape
