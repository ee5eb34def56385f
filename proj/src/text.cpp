#include "docape/text.hpp"

#include "docape/error.hpp"

#include <numeric>

namespace docape {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::EmptyField: return "EmptyField";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::MissingExemplars: return "MissingExemplars";
        case ErrorCode::InsufficientPool: return "InsufficientPool";
        case ErrorCode::MissingEmbedding: return "MissingEmbedding";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::ProtocolError: return "ProtocolError";
        case ErrorCode::RemoteError: return "RemoteError";
        case ErrorCode::UnsupportedCapability: return "UnsupportedCapability";
        case ErrorCode::EmptyContinuation: return "EmptyContinuation";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::BackendUnavailable: return "BackendUnavailable";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::TooSmall: return "TooSmall";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::EmptyBenchmark: return "EmptyBenchmark";
        case ErrorCode::StorageError: return "StorageError";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::CorruptState: return "CorruptState";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::Cancelled: return "Cancelled";
        case ErrorCode::AlreadyExists: return "AlreadyExists";
    }
    return "Unknown";
}

std::size_t count_tokens(std::string_view text) {
    std::size_t count = 0;
    bool in_token = false;
    for (char c : text) {
        if (is_space(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++count;
        }
    }
    return count;
}

std::string_view trim(std::string_view text) {
    std::size_t begin = 0;
    while (begin < text.size() && is_space(text[begin])) ++begin;
    std::size_t end = text.size();
    while (end > begin && is_space(text[end - 1])) --end;
    return text.substr(begin, end - begin);
}

std::string sanitize(std::string_view text) {
    std::string flat;
    flat.reserve(text.size());
    for (char c : text) flat.push_back(c == '\n' || c == '\r' ? ' ' : c);

    std::string out;
    out.reserve(flat.size());
    std::size_t pos = 0;
    while (true) {
        std::size_t hit = flat.find(kSeparator, pos);
        if (hit == std::string::npos) {
            out.append(flat, pos, std::string::npos);
            break;
        }
        out.append(flat, pos, hit - pos);
        out.append(kSanitizedSeparator);
        pos = hit + kSeparator.size();
    }
    return std::string(trim(out));
}

Sentence Sentence::from(std::string_view raw) {
    Sentence s;
    s.text = sanitize(raw);
    s.token_count = count_tokens(s.text);
    return s;
}

std::vector<std::string> Document::texts() const {
    std::vector<std::string> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back(s.text);
    return out;
}

std::vector<std::size_t> Document::token_counts() const {
    std::vector<std::size_t> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back(s.token_count);
    return out;
}

Document make_document(std::string doc_id, const std::vector<std::string>& sentences) {
    if (doc_id.empty()) throw Error(ErrorCode::EmptyField, "document id is empty");
    if (sentences.empty()) throw Error(ErrorCode::EmptyField, "document has no sentences", doc_id);
    Document doc{std::move(doc_id), {}};
    doc.sentences.reserve(sentences.size());
    for (const auto& s : sentences) doc.sentences.push_back(Sentence::from(s));
    return doc;
}

std::vector<IndexRange> chunk_token_counts(std::span<const std::size_t> token_counts, std::size_t limit) {
    if (limit == 0) throw Error(ErrorCode::InvalidArgument, "chunk limit must be positive");
    std::vector<IndexRange> chunks;
    std::size_t start = 0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < token_counts.size(); ++i) {
        if (i > start && used + token_counts[i] > limit) {
            chunks.push_back({start, i});
            start = i;
            used = 0;
        }
        used += token_counts[i];
    }
    if (start < token_counts.size()) chunks.push_back({start, token_counts.size()});
    return chunks;
}

std::vector<Chunk> chunk_document(const Document& doc, std::size_t limit) {
    const auto counts = doc.token_counts();
    std::vector<Chunk> chunks;
    for (const auto& range : chunk_token_counts(counts, limit)) {
        const auto tokens = std::accumulate(counts.begin() + static_cast<std::ptrdiff_t>(range.start),
                                            counts.begin() + static_cast<std::ptrdiff_t>(range.end), std::size_t{0});
        chunks.push_back({doc.doc_id, range, tokens});
    }
    return chunks;
}

IndexRange left_context_window(std::span<const std::size_t> token_counts, std::size_t i, std::size_t limit) {
    if (i >= token_counts.size()) throw Error(ErrorCode::IndexOutOfRange, "sentence index out of range");
    if (limit == 0) throw Error(ErrorCode::InvalidArgument, "window limit must be positive");
    std::size_t used = token_counts[i];
    std::size_t start = i;
    while (start > 0 && used + token_counts[start - 1] <= limit) {
        --start;
        used += token_counts[start];
    }
    return {start, i + 1};
}

IndexRange left_context_window(const Document& doc, std::size_t i, std::size_t limit) {
    const auto counts = doc.token_counts();
    return left_context_window(counts, i, limit);
}

std::vector<std::string> split_on_separator(std::string_view text, std::string_view separator) {
    std::vector<std::string> parts;
    if (separator.empty()) {
        parts.emplace_back(trim(text));
    } else {
        std::size_t pos = 0;
        while (true) {
            std::size_t hit = text.find(separator, pos);
            if (hit == std::string_view::npos) {
                parts.emplace_back(trim(text.substr(pos)));
                break;
            }
            parts.emplace_back(trim(text.substr(pos, hit - pos)));
            pos = hit + separator.size();
        }
    }
    while (!parts.empty() && parts.back().empty()) parts.pop_back();
    return parts;
}

std::string join_with_separator(std::span<const std::string> parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out.append(kSeparatorJoin);
        out.append(parts[i]);
    }
    return out;
}

}  // namespace docape
