#include "docape/datagen.hpp"

#include "docape/error.hpp"
#include "docape/util.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

namespace docape {

using nlohmann::json;

CorpusHalves partition_corpus(const std::vector<ParallelDocument>& corpus, std::uint64_t seed) {
    if (corpus.size() < 2) throw Error(ErrorCode::TooSmall, "partitioning needs at least two documents");
    auto order = seeded_permutation(corpus.size(), seed);
    const std::size_t half = (corpus.size() + 1) / 2;
    std::vector<std::size_t> a(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half));
    std::vector<std::size_t> b(order.begin() + static_cast<std::ptrdiff_t>(half), order.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CorpusHalves halves;
    for (auto i : a) halves.a.push_back(corpus[i]);
    for (auto i : b) halves.b.push_back(corpus[i]);
    return halves;
}

CrossTranslation cross_translate(const std::vector<ParallelDocument>& half_a, const std::vector<ParallelDocument>& half_b,
                                 TranslationBackend& trained_on_a, TranslationBackend& trained_on_b,
                                 const CrossOptions& options) {
    struct Job {
        const ParallelDocument* doc;
        std::size_t index;
        TranslationBackend* backend;
    };
    std::vector<Job> jobs;
    // Documents of A are translated by the model that never saw them, and vice versa.
    for (const auto& doc : half_a) {
        for (std::size_t i = 0; i < doc.size(); ++i) jobs.push_back({&doc, i, &trained_on_b});
    }
    for (const auto& doc : half_b) {
        for (std::size_t i = 0; i < doc.size(); ++i) jobs.push_back({&doc, i, &trained_on_a});
    }

    std::vector<std::optional<Triple>> slots(jobs.size());
    std::vector<std::string> errors(jobs.size());
    auto run = [&](std::size_t j) {
        const auto& job = jobs[j];
        const auto& source = job.doc->source.sentences[job.index];
        for (int attempt = 0; attempt <= options.retries; ++attempt) {
            try {
                auto hyp = translate(*job.backend, source);
                if (hyp.text.empty()) throw Error(ErrorCode::RemoteError, "empty translation");
                slots[j] = Triple{job.doc->doc_id(), job.index, source.text, std::move(hyp.text),
                                  job.doc->reference.sentences[job.index].text};
                return;
            } catch (const Error& e) {
                errors[j] = std::string(to_string(e.code())) + ": " + e.what();
            }
        }
    };

    parallel_for(jobs.size(), options.parallelism, run);

    CrossTranslation out;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (slots[j]) {
            out.triples.push_back(std::move(*slots[j]));
        } else {
            out.dropped.push_back({jobs[j].doc->doc_id(), jobs[j].index, errors[j]});
        }
    }
    return out;
}

ExportKind export_kind_from(std::string_view name) {
    if (name == "sent" || name == "SentAPE" || name == "sentence") return ExportKind::SentAPE;
    if (name == "doc" || name == "DocAPE" || name == "document") return ExportKind::DocAPE;
    throw Error(ErrorCode::InvalidArgument, "unknown export kind", std::string(name));
}

namespace {

TrainingRecord split_record(const RenderedPrompt& rendered, std::string doc_id, IndexRange range) {
    TrainingRecord record;
    record.doc_id = std::move(doc_id);
    record.range = range;
    record.prompt = rendered.prompt_text.substr(0, rendered.mask_boundary);
    record.completion = rendered.prompt_text.substr(rendered.mask_boundary);
    record.mask_boundary = rendered.mask_boundary;
    return record;
}

}  // namespace

std::vector<TrainingRecord> export_training_examples(const std::vector<Triple>& triples, ExportKind kind,
                                                     std::size_t chunk_limit) {
    std::set<std::pair<std::string, std::size_t>> seen;
    for (const auto& t : triples) {
        if (!seen.emplace(t.doc_id, t.index).second) {
            throw Error(ErrorCode::InvalidArgument, "duplicate triple", t.doc_id + ":" + std::to_string(t.index));
        }
    }

    std::vector<TrainingRecord> records;
    if (kind == ExportKind::SentAPE) {
        for (const auto& t : triples) {
            records.push_back(split_record(render_sent_ape(t.source, t.hypothesis, t.reference), t.doc_id,
                                           {t.index, t.index + 1}));
        }
        return records;
    }

    std::vector<std::string> order;
    std::map<std::string, std::vector<const Triple*>> groups;
    for (const auto& t : triples) {
        auto [it, inserted] = groups.try_emplace(t.doc_id);
        if (inserted) order.push_back(t.doc_id);
        it->second.push_back(&t);
    }
    for (const auto& doc_id : order) {
        auto& group = groups[doc_id];
        std::sort(group.begin(), group.end(), [](const Triple* a, const Triple* b) { return a->index < b->index; });
        std::vector<std::size_t> counts;
        for (const auto* t : group) counts.push_back(count_tokens(t->source));
        for (const auto& range : chunk_token_counts(counts, chunk_limit)) {
            std::vector<std::string> src, hyp, ref;
            for (auto k = range.start; k < range.end; ++k) {
                src.push_back(group[k]->source);
                hyp.push_back(group[k]->hypothesis);
                ref.push_back(group[k]->reference);
            }
            const IndexRange sentences{group[range.start]->index, group[range.end - 1]->index + 1};
            records.push_back(split_record(render_doc_ape(src, hyp, {}, ref), doc_id, sentences));
        }
    }
    return records;
}

json to_json(const TrainingRecord& record) {
    return json{{"doc_id", record.doc_id},
                {"start", record.range.start},
                {"end", record.range.end},
                {"prompt", record.prompt},
                {"completion", record.completion},
                {"mask_boundary", utf8_length(record.prompt)},
                {"mask_anchor", kPostEditAnchor}};
}

void write_triples(std::ostream& out, const std::vector<Triple>& triples) {
    for (const auto& t : triples) {
        out << json{{"doc_id", t.doc_id}, {"index", t.index}, {"src", t.source}, {"hyp", t.hypothesis},
                    {"ref", t.reference}}
                   .dump()
            << '\n';
    }
}

std::vector<Triple> read_triples(std::istream& in) {
    std::vector<Triple> out;
    for_each_jsonl(in, [&](const json& r, std::size_t line_no) {
        try {
            Triple t{r.at("doc_id").get<std::string>(), r.at("index").get<std::size_t>(),
                     sanitize(r.at("src").get<std::string>()), sanitize(r.at("hyp").get<std::string>()),
                     sanitize(r.at("ref").get<std::string>())};
            if (t.source.empty() || t.hypothesis.empty() || t.reference.empty()) {
                throw Error(ErrorCode::ParseError, "empty triple field at line " + std::to_string(line_no),
                            std::to_string(line_no));
            }
            out.push_back(std::move(t));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, "bad triple at line " + std::to_string(line_no) + ": " + e.what(),
                        std::to_string(line_no));
        }
    });
    return out;
}

}  // namespace docape
