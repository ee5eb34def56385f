#include "docape/feedback.hpp"

#include "docape/error.hpp"
#include "docape/util.hpp"

#include <algorithm>

namespace docape {

using nlohmann::json;

std::string_view to_string(SentenceStatus status) {
    switch (status) {
        case SentenceStatus::Machine: return "Machine";
        case SentenceStatus::Human: return "Human";
        case SentenceStatus::Regenerating: return "Regenerating";
        case SentenceStatus::Fallback: return "Fallback";
    }
    return "Machine";
}

SentenceStatus sentence_status_from(std::string_view name) {
    if (name == "Machine") return SentenceStatus::Machine;
    if (name == "Human") return SentenceStatus::Human;
    if (name == "Regenerating") return SentenceStatus::Regenerating;
    if (name == "Fallback") return SentenceStatus::Fallback;
    throw Error(ErrorCode::InvalidArgument, "unknown sentence status", std::string(name));
}

bool Session::settled() const {
    return std::none_of(status.begin(), status.end(), [](SentenceStatus s) { return s == SentenceStatus::Regenerating; });
}

std::vector<std::string> Session::output_texts() const {
    std::vector<std::string> out;
    out.reserve(outputs.size());
    for (const auto& o : outputs) out.push_back(o.text);
    return out;
}

json to_json(const Session& s) {
    json sentences = json::array();
    for (std::size_t i = 0; i < s.size(); ++i) {
        sentences.push_back({{"src", s.doc.sentences[i].text},
                             {"nmt_hyp", s.nmt_hyps[i]},
                             {"output", s.outputs[i].text},
                             {"provenance", to_string(s.outputs[i].provenance)},
                             {"status", to_string(s.status[i])}});
    }
    return json{{"session_id", s.session_id},
                {"doc_id", s.doc.doc_id},
                {"strategy", to_string(s.strategy.kind)},
                {"chunk_limit", s.strategy.chunk_limit},
                {"revision", s.revision},
                {"backends", {{"nmt", s.nmt_backend}, {"llm", s.llm_backend}}},
                {"sentences", std::move(sentences)}};
}

Session session_from_json(const json& j) {
    Session s;
    s.session_id = j.at("session_id").get<std::string>();
    s.strategy.kind = strategy_kind_from(j.at("strategy").get<std::string>());
    s.strategy.chunk_limit = j.at("chunk_limit").get<std::size_t>();
    s.revision = j.at("revision").get<std::uint64_t>();
    s.nmt_backend = j.at("backends").at("nmt").get<std::string>();
    s.llm_backend = j.at("backends").at("llm").get<std::string>();
    std::vector<std::string> sources;
    for (const auto& row : j.at("sentences")) {
        sources.push_back(row.at("src").get<std::string>());
        s.nmt_hyps.push_back(row.at("nmt_hyp").get<std::string>());
        s.outputs.push_back({row.at("output").get<std::string>(), provenance_from(row.at("provenance").get<std::string>())});
        s.status.push_back(sentence_status_from(row.at("status").get<std::string>()));
    }
    s.doc = make_document(j.at("doc_id").get<std::string>(), sources);
    return s;
}

bool valid_session_id(std::string_view id) {
    if (id.empty() || id.size() > 128) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    });
}

Session create_session(std::string session_id, Document doc, Strategy strategy, const SessionBackends& backends,
                       const DecodeOptions& options) {
    if (!valid_session_id(session_id)) throw Error(ErrorCode::InvalidArgument, "invalid session id", session_id);
    if (doc.sentences.empty()) throw Error(ErrorCode::EmptyField, "document has no sentences");
    if (strategy.chunk_limit == 0) throw Error(ErrorCode::InvalidArgument, "chunk limit must be positive");

    Session s;
    s.session_id = std::move(session_id);
    s.strategy = strategy;
    s.nmt_backend = backends.nmt_name;
    s.llm_backend = backends.llm_name;
    s.nmt_hyps.reserve(doc.size());
    for (const auto& sentence : doc.sentences) {
        try {
            auto hyp = translate(backends.nmt, sentence);
            if (hyp.text.empty()) throw Error(ErrorCode::RemoteError, "empty translation");
            s.nmt_hyps.push_back(std::move(hyp.text));
        } catch (const Error& e) {
            throw Error(ErrorCode::BackendUnavailable, "translation backend failed: " + std::string(e.what()),
                        backends.nmt_name);
        }
    }
    s.doc = std::move(doc);
    auto initial = decode(s.doc, s.nmt_hyps, backends.llm, strategy, options);
    s.outputs = std::move(initial.outputs);
    s.status.reserve(s.outputs.size());
    for (const auto& o : s.outputs) {
        s.status.push_back(o.provenance == Provenance::NMTFallback ? SentenceStatus::Fallback : SentenceStatus::Machine);
    }
    s.revision = 1;
    return s;
}

void mark_edit(Session& session, std::size_t index, const std::string& text) {
    if (index >= session.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "edit index out of range",
                    std::to_string(index) + " >= " + std::to_string(session.size()));
    }
    if (trim(text).empty()) throw Error(ErrorCode::EmptyField, "edit text is empty");
    if (text.find(kSeparator) != std::string::npos || text.find('\n') != std::string::npos) {
        throw Error(ErrorCode::InvalidArgument, "edit text must not contain the separator or newlines");
    }
    session.outputs[index] = {std::string(trim(text)), Provenance::Human};
    session.status[index] = SentenceStatus::Human;
    for (auto j = index + 1; j < session.size(); ++j) {
        if (session.status[j] != SentenceStatus::Human) session.status[j] = SentenceStatus::Regenerating;
    }
    ++session.revision;
}

std::optional<std::size_t> next_pending(const Session& session) {
    for (std::size_t i = 0; i < session.size(); ++i) {
        if (session.status[i] == SentenceStatus::Regenerating) return i;
    }
    return std::nullopt;
}

ContinuousDecoder::Step regenerate_step(const Session& session, std::size_t i, CompletionBackend& llm) {
    ContinuousDecoder decoder(session.doc, session.nmt_hyps, llm, session.strategy.chunk_limit);
    std::vector<std::string> forced;
    forced.reserve(i);
    for (std::size_t k = 0; k < i; ++k) forced.push_back(session.outputs[k].text);
    return decoder.step(i, forced);
}

void commit_step(Session& session, std::size_t i, SentenceOutput output) {
    if (i >= session.size() || session.status[i] == SentenceStatus::Human) return;
    session.status[i] = output.provenance == Provenance::NMTFallback ? SentenceStatus::Fallback : SentenceStatus::Machine;
    session.outputs[i] = std::move(output);
}

void settle(Session& session, CompletionBackend& llm, const std::function<bool()>& cancelled) {
    while (auto i = next_pending(session)) {
        if (cancelled && cancelled()) return;
        auto step = regenerate_step(session, *i, llm);
        commit_step(session, *i, std::move(step.output));
    }
}

void apply_edit(Session& session, std::size_t index, const std::string& text, CompletionBackend& llm) {
    mark_edit(session, index, text);
    settle(session, llm);
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    const auto x = utf8_decode(a);
    const auto y = utf8_decode(b);
    std::vector<std::size_t> row(y.size() + 1);
    for (std::size_t j = 0; j <= y.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= x.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= y.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (x[i - 1] == y[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[y.size()];
}

EditEffort edit_effort(const std::vector<std::string>& outputs, const std::vector<std::string>& references) {
    if (outputs.size() != references.size()) {
        throw Error(ErrorCode::LengthMismatch, "outputs and references differ in length",
                    std::to_string(outputs.size()) + " vs " + std::to_string(references.size()));
    }
    EditEffort effort;
    effort.per_sentence.reserve(outputs.size());
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        effort.per_sentence.push_back(levenshtein(outputs[i], references[i]));
        effort.total += effort.per_sentence.back();
    }
    return effort;
}

}  // namespace docape
