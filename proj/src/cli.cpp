#include "docape/cli.hpp"

#include "docape/config.hpp"
#include "docape/contrastive.hpp"
#include "docape/corpus_io.hpp"
#include "docape/datagen.hpp"
#include "docape/decoding.hpp"
#include "docape/metrics.hpp"
#include "docape/service.hpp"
#include "docape/tagger.hpp"
#include "docape/util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <pthread.h>
#include <sstream>
#include <thread>

namespace docape {

using nlohmann::json;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::EmptyField:
        case ErrorCode::LengthMismatch:
        case ErrorCode::MissingExemplars:
        case ErrorCode::InsufficientPool:
        case ErrorCode::MissingEmbedding:
        case ErrorCode::EmptyContinuation:
        case ErrorCode::ParseError:
        case ErrorCode::IndexOutOfRange:
        case ErrorCode::TooSmall:
        case ErrorCode::EmptyCorpus:
        case ErrorCode::EmptyBenchmark:
        case ErrorCode::AlreadyExists: return kExitValidation;
        default: return kExitBackend;
    }
}

namespace {

json descriptor_json(const BackendDescriptor& d) {
    return json{{"name", d.name},
                {"kind", std::string(to_string(d.kind))},
                {"endpoint", d.endpoint},
                {"model_id", d.model_id},
                {"timeout_ms", d.timeout.count()},
                {"max_retries", d.max_retries},
                {"max_in_flight", d.max_in_flight}};
}

/// Shared state of one invocation: config, backends and the run manifest.
class Run {
public:
    Run(std::string command, const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
        : out_(out), err_(err) {
        manifest_ = json{{"command", std::move(command)},
                         {"argv", args},
                         {"started_at", utc_timestamp()},
                         {"versions", {{"docape", std::string(kVersion)}, {"session_schema", kSessionSchemaVersion}}},
                         {"inputs", json::array()},
                         {"backends", json::array()},
                         {"outputs", json::array()}};
    }

    void load_config(const std::string& path) {
        if (!path.empty()) {
            config_ = docape::load_config(path);
            manifest_["config"] = {{"path", path}, {"sha256", sha256_hex(read_file(path))}};
        }
        apply_env_overrides(config_);
        registry_ = std::make_unique<BackendRegistry>(config_);
    }

    const AppConfig& config() const { return config_; }
    BackendRegistry& registry() { return *registry_; }

    /// A configured backend name, or an ad-hoc `scripted:<path>` / `http(s)://` endpoint.
    std::string backend(const std::string& spec, BackendKind kind) {
        if (!registry_->contains(spec)) {
            if (spec.rfind("scripted:", 0) == 0 || spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
                BackendDescriptor d;
                d.name = spec;
                d.kind = kind;
                d.endpoint = spec;
                registry_->add(d);
            } else {
                throw Error(ErrorCode::BackendUnavailable, "unknown backend", spec);
            }
        }
        const auto& d = registry_->descriptor(spec);
        json entry = descriptor_json(d);
        if (d.endpoint.rfind("scripted:", 0) == 0) {
            auto path = std::filesystem::path(d.endpoint.substr(9));
            if (path.is_relative()) path = config_.base_dir / path;
            std::error_code ec;
            if (std::filesystem::exists(path, ec)) entry["fixture_sha256"] = sha256_hex(read_file(path));
        }
        manifest_["backends"].push_back(std::move(entry));
        return spec;
    }
    CompletionBackend& completion(const std::string& spec) {
        return registry_->completion(backend(spec, BackendKind::Completion));
    }
    TranslationBackend& translation(const std::string& spec) {
        return registry_->translation(backend(spec, BackendKind::Translation));
    }

    std::string input(const std::string& path) {
        auto bytes = read_file(path);
        manifest_["inputs"].push_back({{"path", path}, {"sha256", sha256_hex(bytes)}});
        return bytes;
    }
    std::vector<Document> corpus(const std::string& path) {
        input(path);
        return read_corpus(path);
    }

    json& manifest() { return manifest_; }

    /// Writes `text` to `path`, or to stdout when the path is empty.
    void emit(const std::string& path, const std::string& text) {
        if (path.empty()) {
            out_ << text;
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error(ErrorCode::StorageError, "cannot write " + path);
        f << text;
        if (!f) throw Error(ErrorCode::StorageError, "cannot write " + path);
        manifest_["outputs"].push_back({{"path", path}, {"sha256", sha256_hex(text)}});
    }
    void emit_corpus(const std::string& path, const std::vector<Document>& docs) {
        std::ostringstream s;
        if (!path.empty() && detect_format(path) == CorpusFormat::Jsonl) {
            write_jsonl_corpus(s, docs);
        } else {
            write_plain_corpus(s, docs);
        }
        emit(path, s.str());
    }

    /// Manifest goes next to the primary output, or to stderr as one line.
    void finish(const std::string& primary_output, int exit_code) {
        manifest_["exit_code"] = exit_code;
        manifest_["finished_at"] = utc_timestamp();
        if (primary_output.empty()) {
            err_ << manifest_.dump() << "\n";
            return;
        }
        std::ofstream f(primary_output + ".manifest.json", std::ios::binary);
        f << manifest_.dump(2) << "\n";
    }

    std::ostream& err() { return err_; }

private:
    std::ostream& out_;
    std::ostream& err_;
    json manifest_;
    AppConfig config_;
    std::unique_ptr<BackendRegistry> registry_ = std::make_unique<BackendRegistry>();
};

std::string jsonl(const std::vector<json>& records) {
    std::string text;
    for (const auto& r : records) text += r.dump() + "\n";
    return text;
}

std::vector<ParallelDocument> read_parallel(Run& run, const std::string& path) {
    std::istringstream in(run.input(path));
    std::vector<ParallelDocument> docs;
    for_each_jsonl(in, [&](const json& r, std::size_t line_no) {
        try {
            const auto id = r.at("doc_id").get<std::string>();
            docs.push_back({make_document(id, r.at("source").get<std::vector<std::string>>()),
                            make_document(id, r.at("reference").get<std::vector<std::string>>())});
            if (docs.back().source.size() != docs.back().reference.size()) {
                throw Error(ErrorCode::LengthMismatch, "source and reference differ in length", id);
            }
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, "bad parallel record at line " + std::to_string(line_no) + ": " + e.what(),
                        std::to_string(line_no));
        }
    });
    return docs;
}

std::string parallel_jsonl(const std::vector<ParallelDocument>& docs) {
    std::vector<json> records;
    for (const auto& d : docs) {
        records.push_back({{"doc_id", d.doc_id()}, {"source", d.source.texts()}, {"reference", d.reference.texts()}});
    }
    return jsonl(records);
}

TagLexicons lexicons_for(const Run& run, const std::string& path) {
    if (!path.empty()) return load_lexicons(path);
    if (run.config().lexicons) return load_lexicons(*run.config().lexicons);
    return TagLexicons::english_german();
}

int serve(Run& run, const std::string& host, std::optional<int> port, const std::string& data_dir) {
    auto config = run.config();
    if (port) config.port = *port;
    if (!data_dir.empty()) config.data_dir = data_dir;
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    SessionManager::Options options;
    options.data_dir = config.data_dir;
    SessionManager sessions(run.registry(), options);
    const auto resumed = sessions.resume();
    ApiServer server(sessions, lexicons_for(run, ""));
    const int bound = server.bind(host, config.port);
    if (bound < 0) throw Error(ErrorCode::StorageError, "cannot bind " + host + ":" + std::to_string(config.port));
    run.err() << "docape: serving on http://" << host << ":" << bound << " (" << resumed << " sessions resumed, data in "
              << config.data_dir.string() << ")\n";

    std::thread waiter([&signals, &server] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    const bool ok = server.listen();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return ok ? kExitOk : kExitBackend;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Document-level automatic post-editing toolkit", "docape"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", std::string(kVersion));
    std::string config_path;
    app.add_option("--config", config_path, "TOML backend/service config")->check(CLI::ExistingFile);

    // translate
    auto* translate_cmd = app.add_subcommand("translate", "Translate a source corpus with an NMT backend");
    std::string tr_in, tr_backend, tr_out;
    std::size_t tr_jobs = 1;
    translate_cmd->add_option("--in", tr_in, "Source corpus")->required();
    translate_cmd->add_option("--backend", tr_backend, "Translation backend")->required();
    translate_cmd->add_option("--out", tr_out, "Hypothesis corpus (stdout when absent)");
    translate_cmd->add_option("--jobs", tr_jobs, "Parallel documents")->check(CLI::PositiveNumber);

    // postedit
    auto* pe_cmd = app.add_subcommand("postedit", "Post-edit NMT hypotheses with a decoding strategy");
    std::string pe_strategy = "continuous-sw", pe_in, pe_hyps, pe_backend, pe_gold, pe_out, pe_outputs;
    std::string pe_prompt = "fine-tuned";
    std::size_t pe_limit = kInferenceChunkLimit, pe_jobs = 1;
    double pe_temperature = 0.0;
    pe_cmd->add_option("--strategy", pe_strategy, "sentence | chunked | batched-sw | continuous-sw")
        ->check(CLI::IsMember({"sentence", "chunked", "batched-sw", "continuous-sw"}));
    pe_cmd->add_option("--chunk-limit", pe_limit, "Whitespace-token budget per window")->check(CLI::PositiveNumber);
    pe_cmd->add_option("--in", pe_in, "Source corpus")->required();
    pe_cmd->add_option("--hyps", pe_hyps, "NMT hypothesis corpus")->required();
    pe_cmd->add_option("--backend", pe_backend, "Completion backend")->required();
    pe_cmd->add_option("--gold-refs", pe_gold, "Reference corpus forced as target context (continuous-sw)");
    pe_cmd->add_option("--sentence-prompt", pe_prompt, "fine-tuned | zero-shot (sentence strategy)")
        ->check(CLI::IsMember({"fine-tuned", "zero-shot"}));
    pe_cmd->add_option("--temperature", pe_temperature, "Sampling temperature");
    pe_cmd->add_option("--jobs", pe_jobs, "Parallel documents")->check(CLI::PositiveNumber);
    pe_cmd->add_option("--out", pe_out, "DocResult JSONL (stdout when absent)");
    pe_cmd->add_option("--outputs", pe_outputs, "Also write the post-edited corpus here");

    // datagen-split
    auto* split_cmd = app.add_subcommand("datagen-split", "Seeded document-level split of a parallel corpus");
    std::string sp_src, sp_ref, sp_a, sp_b;
    std::uint64_t sp_seed = 0;
    split_cmd->add_option("--src", sp_src, "Source corpus")->required();
    split_cmd->add_option("--ref", sp_ref, "Reference corpus")->required();
    split_cmd->add_option("--seed", sp_seed, "Partition seed")->required();
    split_cmd->add_option("--out-a", sp_a, "Half A (parallel JSONL)")->required();
    split_cmd->add_option("--out-b", sp_b, "Half B (parallel JSONL)")->required();

    // datagen-cross
    auto* cross_cmd = app.add_subcommand("datagen-cross", "Cross-translate the halves into APE triples");
    std::string cr_a, cr_b, cr_model_a, cr_model_b, cr_out;
    int cr_retries = 1;
    std::size_t cr_jobs = 1;
    cross_cmd->add_option("--a", cr_a, "Half A (parallel JSONL)")->required();
    cross_cmd->add_option("--b", cr_b, "Half B (parallel JSONL)")->required();
    cross_cmd->add_option("--model-a", cr_model_a, "Translation backend trained on half A")->required();
    cross_cmd->add_option("--model-b", cr_model_b, "Translation backend trained on half B")->required();
    cross_cmd->add_option("--retries", cr_retries, "Extra attempts per sentence")->check(CLI::NonNegativeNumber);
    cross_cmd->add_option("--jobs", cr_jobs, "Parallel sentences")->check(CLI::PositiveNumber);
    cross_cmd->add_option("--out", cr_out, "Triples JSONL (stdout when absent)");

    // export-train
    auto* export_cmd = app.add_subcommand("export-train", "Format triples as masked training examples");
    std::string ex_triples, ex_kind = "doc", ex_out;
    std::size_t ex_limit = kTrainingChunkLimit;
    export_cmd->add_option("--triples", ex_triples, "Triples JSONL")->required();
    export_cmd->add_option("--kind", ex_kind, "sent | doc")->check(CLI::IsMember({"sent", "doc"}));
    export_cmd->add_option("--chunk-limit", ex_limit, "Source-token budget per DocAPE example")
        ->check(CLI::PositiveNumber);
    export_cmd->add_option("--out", ex_out, "Training JSONL (stdout when absent)");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "BLEU, ChrF2 and context-phenomenon P/R/F1");
    std::string ev_hyps, ev_refs, ev_src, ev_lex, ev_smoothing = "none", ev_out;
    std::optional<double> ev_comet;
    eval_cmd->add_option("--hyps", ev_hyps, "Hypothesis corpus")->required();
    eval_cmd->add_option("--refs", ev_refs, "Reference corpus")->required();
    eval_cmd->add_option("--src", ev_src, "Source corpus (enables the pronoun rule)");
    eval_cmd->add_option("--lexicons", ev_lex, "Tagger lexicons TOML");
    eval_cmd->add_option("--smoothing", ev_smoothing, "none | add-one")->check(CLI::IsMember({"none", "add-one"}));
    eval_cmd->add_option("--comet", ev_comet, "Externally computed COMET, passed through");
    eval_cmd->add_option("--out", ev_out, "Report JSON (stdout when absent)");

    // contrapro
    auto* cp_cmd = app.add_subcommand("contrapro", "Contrastive pronoun accuracy by continuation scoring");
    std::string cp_in, cp_backend, cp_nmt, cp_out;
    std::size_t cp_ctx = 1, cp_jobs = 1;
    cp_cmd->add_option("--in", cp_in, "Contrastive instances JSONL")->required();
    cp_cmd->add_option("--backend", cp_backend, "Completion backend with echo logprobs")->required();
    cp_cmd->add_option("--nmt", cp_nmt, "Translation backend for missing hypotheses");
    cp_cmd->add_option("--ctx-size", cp_ctx, "Context sentences");
    cp_cmd->add_option("--jobs", cp_jobs, "Parallel instances")->check(CLI::PositiveNumber);
    cp_cmd->add_option("--out", cp_out, "Result JSON (stdout when absent)");

    // tag
    auto* tag_cmd = app.add_subcommand("tag", "Tag context-dependent words of a target corpus");
    std::string tg_in, tg_src, tg_lex, tg_out;
    tag_cmd->add_option("--in", tg_in, "Target corpus")->required();
    tag_cmd->add_option("--src", tg_src, "Aligned source corpus");
    tag_cmd->add_option("--lexicons", tg_lex, "Tagger lexicons TOML");
    tag_cmd->add_option("--out", tg_out, "Tags JSONL (stdout when absent)");

    // stats-chunks
    auto* stats_cmd = app.add_subcommand("stats-chunks", "Histogram of sentences per chunk for each limit");
    std::string st_in, st_out;
    std::vector<std::size_t> st_limits{kTrainingChunkLimit, kInferenceChunkLimit};
    stats_cmd->add_option("--in", st_in, "Source corpus")->required();
    stats_cmd->add_option("--limits", st_limits, "Comma-separated token limits")->delimiter(',')
        ->check(CLI::PositiveNumber);
    stats_cmd->add_option("--out", st_out, "Histogram JSON (stdout when absent)");

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "Run the session API server");
    std::string sv_host = "127.0.0.1", sv_data;
    std::optional<int> sv_port;
    serve_cmd->add_option("--host", sv_host, "Bind address");
    serve_cmd->add_option("--port", sv_port, "Port (overrides config and DOCAPE_PORT)");
    serve_cmd->add_option("--data-dir", sv_data, "Session directory (overrides config and DOCAPE_DATA_DIR)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion& e) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitValidation;
    }

    const auto* sub = app.get_subcommands().front();
    Run run(sub->get_name(), args, out, err);
    std::string primary;
    int code = kExitOk;
    try {
        run.load_config(config_path);

        if (sub == translate_cmd) {
            primary = tr_out;
            auto docs = run.corpus(tr_in);
            auto& backend = run.translation(tr_backend);
            std::vector<Document> hyps(docs.size());
            parallel_for(docs.size(), tr_jobs, [&](std::size_t d) {
                std::vector<std::string> texts;
                for (const auto& s : docs[d].sentences) {
                    auto hyp = translate(backend, s).text;
                    if (hyp.empty()) throw Error(ErrorCode::RemoteError, "empty translation", docs[d].doc_id);
                    texts.push_back(std::move(hyp));
                }
                hyps[d] = make_document(docs[d].doc_id, texts);
            });
            run.emit_corpus(tr_out, hyps);

        } else if (sub == pe_cmd) {
            primary = pe_out;
            const auto kind = strategy_kind_from(pe_strategy);
            if (!pe_gold.empty() && kind != StrategyKind::ContinuousSW) {
                throw Error(ErrorCode::InvalidArgument, "--gold-refs needs --strategy continuous-sw");
            }
            auto docs = run.corpus(pe_in);
            const auto hyps = hypotheses_for(docs, run.corpus(pe_hyps));
            std::optional<std::vector<std::vector<std::string>>> gold;
            if (!pe_gold.empty()) gold = hypotheses_for(docs, run.corpus(pe_gold));
            auto& backend = run.completion(pe_backend);
            const Strategy strategy{kind, pe_limit};
            DecodeOptions options;
            options.temperature = pe_temperature;
            options.sentence_prompt = pe_prompt == "zero-shot" ? SentencePrompt::ZeroShot : SentencePrompt::FineTuned;
            run.manifest()["strategy"] = {{"kind", pe_strategy}, {"chunk_limit", pe_limit},
                                          {"gold_refs", !pe_gold.empty()}, {"sentence_prompt", pe_prompt},
                                          {"temperature", pe_temperature}};

            std::vector<DocResult> results(docs.size());
            parallel_for(docs.size(), pe_jobs, [&](std::size_t d) {
                if (gold) {
                    ContinuousOptions c;
                    c.gold_context = (*gold)[d];
                    c.temperature = pe_temperature;
                    results[d] = decode_continuous_sw(docs[d], hyps[d], backend, pe_limit, c);
                } else {
                    results[d] = decode(docs[d], hyps[d], backend, strategy, options);
                }
            });
            std::vector<json> records;
            std::vector<Document> outputs;
            std::size_t fallbacks = 0, failed_docs = 0;
            for (const auto& r : results) {
                records.push_back(to_json(r));
                outputs.push_back(make_document(r.doc_id, r.texts()));
                fallbacks += r.fallback_count;
                if (r.all_failed()) ++failed_docs;
            }
            run.emit(pe_out, jsonl(records));
            if (!pe_outputs.empty()) run.emit_corpus(pe_outputs, outputs);
            run.manifest()["fallback_count"] = fallbacks;
            if (failed_docs > 0) {
                err << "docape: backend produced nothing for " << failed_docs << " document(s)\n";
                code = kExitBackend;
            }

        } else if (sub == split_cmd) {
            primary = sp_a;
            auto corpus = align_parallel(run.corpus(sp_src), run.corpus(sp_ref));
            const auto halves = partition_corpus(corpus, sp_seed);
            run.manifest()["seed"] = sp_seed;
            run.emit(sp_a, parallel_jsonl(halves.a));
            run.emit(sp_b, parallel_jsonl(halves.b));

        } else if (sub == cross_cmd) {
            primary = cr_out;
            const auto a = read_parallel(run, cr_a);
            const auto b = read_parallel(run, cr_b);
            auto& trained_on_a = run.translation(cr_model_a);
            auto& trained_on_b = run.translation(cr_model_b);
            const auto result = cross_translate(a, b, trained_on_a, trained_on_b, {cr_retries, cr_jobs});
            std::ostringstream s;
            write_triples(s, result.triples);
            run.emit(cr_out, s.str());
            json dropped = json::array();
            for (const auto& d : result.dropped) {
                dropped.push_back({{"doc_id", d.doc_id}, {"index", d.index}, {"error", d.error}});
                err << "docape: dropped " << d.doc_id << "#" << d.index << ": " << d.error << "\n";
            }
            run.manifest()["triples"] = result.triples.size();
            run.manifest()["dropped"] = std::move(dropped);

        } else if (sub == export_cmd) {
            primary = ex_out;
            std::istringstream in(run.input(ex_triples));
            const auto records = export_training_examples(read_triples(in), export_kind_from(ex_kind), ex_limit);
            std::vector<json> lines;
            for (const auto& r : records) lines.push_back(to_json(r));
            run.manifest()["export"] = {{"kind", ex_kind}, {"chunk_limit", ex_limit}, {"records", records.size()}};
            run.emit(ex_out, jsonl(lines));

        } else if (sub == eval_cmd) {
            primary = ev_out;
            EvalInputs inputs{run.corpus(ev_hyps), run.corpus(ev_refs), {}};
            if (!ev_src.empty()) inputs.sources = run.corpus(ev_src);
            auto report = evaluate(inputs, lexicons_for(run, ev_lex),
                                   ev_smoothing == "add-one" ? BleuSmoothing::AddOne : BleuSmoothing::None);
            report.comet = ev_comet;
            run.emit(ev_out, to_json(report).dump(2) + "\n");

        } else if (sub == cp_cmd) {
            primary = cp_out;
            std::istringstream in(run.input(cp_in));
            const auto instances = read_instances(in);
            TranslationBackend* nmt = cp_nmt.empty() ? nullptr : &run.translation(cp_nmt);
            const auto result = run_benchmark(instances, nmt, run.completion(cp_backend), cp_ctx, cp_jobs);
            run.manifest()["ctx_size"] = cp_ctx;
            run.emit(cp_out, to_json(result, instances).dump(2) + "\n");

        } else if (sub == tag_cmd) {
            primary = tg_out;
            const auto targets = run.corpus(tg_in);
            std::vector<Document> sources;
            if (!tg_src.empty()) {
                sources = run.corpus(tg_src);
                if (sources.size() != targets.size()) {
                    throw Error(ErrorCode::LengthMismatch, "source and target corpora differ in document count");
                }
            }
            const auto lexicons = lexicons_for(run, tg_lex);
            std::vector<json> lines;
            for (std::size_t d = 0; d < targets.size(); ++d) {
                std::optional<Document> src;
                if (!sources.empty()) src = sources[d];
                json tags = json::array();
                for (const auto& t : tag_document(targets[d], src, lexicons)) tags.push_back(to_json(t));
                lines.push_back({{"doc_id", targets[d].doc_id}, {"tags", std::move(tags)}});
            }
            run.emit(tg_out, jsonl(lines));

        } else if (sub == stats_cmd) {
            primary = st_out;
            const auto docs = run.corpus(st_in);
            json report{{"documents", docs.size()}, {"limits", json::object()}};
            for (auto limit : st_limits) {
                std::map<std::size_t, std::size_t> histogram;
                std::size_t chunks = 0;
                for (const auto& doc : docs) {
                    for (const auto& chunk : chunk_document(doc, limit)) {
                        ++histogram[chunk.range.size()];
                        ++chunks;
                    }
                }
                json h = json::object();
                for (const auto& [sentences, count] : histogram) h[std::to_string(sentences)] = count;
                report["limits"][std::to_string(limit)] = {{"chunks", chunks}, {"sentences_per_chunk", std::move(h)}};
            }
            run.emit(st_out, report.dump(2) + "\n");

        } else if (sub == serve_cmd) {
            code = serve(run, sv_host, sv_port, sv_data);
            return code;
        }
    } catch (const Error& e) {
        err << "error: " << e.what();
        if (!e.detail().empty()) err << " (" << e.detail() << ")";
        err << " [" << to_string(e.code()) << "]\n";
        code = exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        code = kExitBackend;
    }
    run.finish(primary, code);
    return code;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace docape
