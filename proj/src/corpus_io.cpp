#include "docape/corpus_io.hpp"

#include "docape/error.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace docape {

using nlohmann::json;

CorpusFormat detect_format(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    return ext == ".jsonl" || ext == ".json" ? CorpusFormat::Jsonl : CorpusFormat::PlainText;
}

std::vector<Document> read_plain_corpus(std::istream& in, const std::string& id_prefix) {
    std::vector<Document> docs;
    std::vector<std::string> current;
    auto flush = [&] {
        if (current.empty()) return;
        docs.push_back(make_document(id_prefix + "-" + std::to_string(docs.size()), current));
        current.clear();
    };
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) {
            flush();
        } else {
            current.push_back(line);
        }
    }
    flush();
    return docs;
}

void for_each_jsonl(std::istream& in, const std::function<void(const json&, std::size_t)>& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::ParseError, "malformed record at line " + std::to_string(line_no),
                        std::to_string(line_no));
        }
        fn(record, line_no);
    }
}

std::vector<Document> read_jsonl_corpus(std::istream& in) {
    std::vector<Document> docs;
    for_each_jsonl(in, [&](const json& record, std::size_t line_no) {
        try {
            docs.push_back(make_document(record.at("doc_id").get<std::string>(),
                                         record.at("sentences").get<std::vector<std::string>>()));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError,
                        "bad corpus record at line " + std::to_string(line_no) + ": " + e.what(),
                        std::to_string(line_no));
        }
    });
    return docs;
}

std::vector<Document> read_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open corpus", path.string());
    if (detect_format(path) == CorpusFormat::Jsonl) return read_jsonl_corpus(in);
    return read_plain_corpus(in);
}

void write_plain_corpus(std::ostream& out, const std::vector<Document>& docs) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
        if (d > 0) out << '\n';
        for (const auto& s : docs[d].sentences) out << s.text << '\n';
    }
}

void write_jsonl_corpus(std::ostream& out, const std::vector<Document>& docs) {
    for (const auto& doc : docs) {
        out << json{{"doc_id", doc.doc_id}, {"sentences", doc.texts()}}.dump() << '\n';
    }
}

void write_corpus(const std::filesystem::path& path, const std::vector<Document>& docs) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::StorageError, "cannot write corpus", path.string());
    if (detect_format(path) == CorpusFormat::Jsonl) {
        write_jsonl_corpus(out, docs);
    } else {
        write_plain_corpus(out, docs);
    }
}

std::vector<ParallelDocument> align_parallel(std::vector<Document> sources, std::vector<Document> references) {
    if (sources.size() != references.size()) {
        throw Error(ErrorCode::LengthMismatch, "source and reference corpora have different document counts");
    }
    std::vector<ParallelDocument> out;
    out.reserve(sources.size());
    for (std::size_t d = 0; d < sources.size(); ++d) {
        if (sources[d].doc_id != references[d].doc_id || sources[d].size() != references[d].size()) {
            throw Error(ErrorCode::LengthMismatch, "reference document does not align with its source",
                        sources[d].doc_id);
        }
        out.push_back({std::move(sources[d]), std::move(references[d])});
    }
    return out;
}

std::vector<std::vector<std::string>> hypotheses_for(const std::vector<Document>& docs,
                                                     const std::vector<Document>& hyps) {
    if (docs.size() != hyps.size()) {
        throw Error(ErrorCode::LengthMismatch, "hypothesis corpus has a different number of documents");
    }
    std::vector<std::vector<std::string>> out;
    out.reserve(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        if (docs[d].size() != hyps[d].size()) {
            throw Error(ErrorCode::LengthMismatch, "hypothesis document length differs", docs[d].doc_id);
        }
        out.push_back(hyps[d].texts());
    }
    return out;
}

}  // namespace docape
