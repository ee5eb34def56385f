// Acceptance run: one PASS/FAIL line per criterion. Exits 1 if any criterion fails.

#include "docape/contrastive.hpp"
#include "docape/datagen.hpp"
#include "docape/decoding.hpp"
#include "docape/error.hpp"
#include "docape/feedback.hpp"
#include "docape/metrics.hpp"
#include "docape/persistence.hpp"
#include "docape/prompts.hpp"
#include "docape/scripted_backend.hpp"
#include "docape/service.hpp"
#include "docape/session_manager.hpp"
#include "docape/text.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <csignal>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

using namespace docape;
using namespace std::chrono_literals;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and budgets.
constexpr double kBleuIdentityTol = 1e-9;
constexpr double kOracleTol = 1e-6;
constexpr double kChunkerBudgetS = 5.0;
constexpr double kStrategiesBudgetS = 10.0;
constexpr double kServiceBudgetS = 30.0;
constexpr std::size_t kChunkerDocs = 1000;
constexpr std::size_t kMaskTriples = 100;

struct Failure {
    std::string why;
};

void expect(bool ok, const std::string& why) {
    if (!ok) throw Failure{why};
}

int failures = 0;

void criterion(const std::string& name, const std::function<std::string()>& body) {
    const auto start = Clock::now();
    std::string detail, failure;
    try {
        detail = body();
    } catch (const Failure& f) {
        failure = f.why;
    } catch (const std::exception& e) {
        failure = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    std::ostringstream line;
    line.precision(3);
    line << std::fixed;
    if (failure.empty()) {
        line << "PASS " << name << " (" << seconds << "s" << (detail.empty() ? "" : "; " + detail) << ")";
    } else {
        ++failures;
        line << "FAIL " << name << " (" << seconds << "s): " << failure;
    }
    std::cout << line.str() << std::endl;
}

double elapsed(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

std::vector<std::string> hypothesis_parts(const std::string& prompt) {
    const std::string label = "German Translation: ";
    const auto at = prompt.rfind(label) + label.size();
    return split_on_separator(prompt.substr(at, prompt.find('\n', at) - at));
}

std::string rewrite(const std::string& hyp) { return "p" + hyp.substr(1); }

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(12);
    s << x;
    return s.str();
}

// ---------------------------------------------------------------------------------------------

std::string chunker() {
    std::mt19937_64 rng(2024);
    const auto start = Clock::now();
    std::size_t chunks_seen = 0;
    for (std::size_t d = 0; d < kChunkerDocs; ++d) {
        const auto doc = testing::random_document(rng, "doc" + std::to_string(d), 80, 60);
        const auto counts = doc.token_counts();
        for (std::size_t limit : {std::size_t{256}, std::size_t{1024}}) {
            const auto chunks = chunk_document(doc, limit);
            std::size_t next = 0;
            for (std::size_t c = 0; c < chunks.size(); ++c) {
                const auto& r = chunks[c].range;
                expect(r.start == next, "order/coverage broken in " + doc.doc_id);
                expect(r.end > r.start, "empty chunk in " + doc.doc_id);
                const auto sum = std::accumulate(counts.begin() + r.start, counts.begin() + r.end, std::size_t{0});
                expect(r.size() == 1 || sum <= limit, "limit exceeded in " + doc.doc_id);
                expect(c + 1 == chunks.size() || sum + counts[r.end] > limit, "not greedy in " + doc.doc_id);
                next = r.end;
            }
            expect(next == doc.size(), "sentences lost in " + doc.doc_id);
            chunks_seen += chunks.size();
        }
    }
    const double s = elapsed(start);
    expect(s < kChunkerBudgetS, "took " + fmt(s) + "s");
    return std::to_string(kChunkerDocs) + " docs, " + std::to_string(chunks_seen) + " chunks";
}

std::string prompt_goldens() {
    expect(render_sent_ape("It works .", "Es geht .").prompt_text ==
               "English: It works .\nGerman Translation: Es geht .\nPost-Edited Translation:",
           "SentAPE");
    expect(render_doc_ape({"A .", "B ."}, {"X .", "Y ."}).prompt_text ==
               "English: A . <SS> B .\nGerman Translation: X . <SS> Y .\nPost-Edited Translation:",
           "DocAPE");
    expect(render_doc_ape({"A .", "B ."}, {"X .", "Y ."}, {"T ."}, std::nullopt, DocTarget::NextSentence).full_text() ==
               "English: A . <SS> B .\nGerman Translation: X . <SS> Y .\nPost-Edited Translation: T . <SS>",
           "DocAPE forced prefix");
    expect(render_icl({{"S1", "T1"}}, "S2").prompt_text ==
               "### INSTRUCTION:\nTranslate the input from English to German.\n"
               "\n###Input: S1\n####Response: T1\n"
               "\n###Input: S2\n####Response:",
           "ICL");
    expect(render_direct_mt("It works .").prompt_text ==
               "[INST] <<SYS>>\nYou are a professional translator from English to German.\n\n"
               "The output should only be the translation in one line.<</SYS>>\n\n"
               "English: It works .\n[/INST]\nGerman:",
           "DirectMT");
    expect(render_zero_shot_pe("It works .", "Es geht .").prompt_text ==
               "[INST] <<SYS>>You are a post-editor.\n"
               "You improve translations from English to German using the English source and German translation. "
               "Do not provide any explanation or correction.\n"
               "The translation should end with ### in new line\n"
               "<</SYS>>\n"
               "English: It works .\nGerman Translation: Es geht .\n[/INST]\nPost-Edited Translation:",
           "ZeroShotPE");
    return "5 templates";
}

std::string mask_consistency() {
    std::mt19937_64 rng(77);
    for (std::size_t t = 0; t < kMaskTriples; ++t) {
        const auto src = testing::random_sentence(rng, 1 + rng() % 15);
        const auto hyp = testing::random_sentence(rng, 1 + rng() % 15);
        const auto ref = testing::random_sentence(rng, 1 + rng() % 15);
        const auto inference = render_sent_ape(src, hyp);
        const auto training = render_sent_ape(src, hyp, ref);
        const auto full = training.full_text();
        expect(full.substr(0, training.mask_boundary) == inference.full_text(), "masked part differs, triple " +
                                                                                   std::to_string(t));
        expect(full.substr(0, training.mask_boundary).ends_with("Post-Edited Translation:"), "anchor");
        expect(full.substr(training.mask_boundary) == " " + ref, "trainable part");
    }
    return std::to_string(kMaskTriples) + " triples";
}

Clock::duration strategies_time{};

template <typename Fn>
std::string timed_strategy(Fn fn) {
    const auto start = Clock::now();
    auto detail = fn();
    strategies_time += Clock::now() - start;
    return detail;
}

std::string chunked_fallback() {
    return timed_strategy([] {
        std::size_t checked = 0;
        for (std::size_t n = 5; n <= 20; ++n) {
            const auto doc = testing::numbered_document("d", n);
            const auto hyps = testing::numbered(n, "h");
            const auto chunks = chunk_document(doc, 4);
            const std::size_t bad = chunks.size() / 2;
            const std::string marker = hyps[chunks[bad].range.start];
            testing::FunctionBackend backend([&](const CompletionRequest& r) {
                auto parts = hypothesis_parts(r.prompt);
                const bool drop = parts.front() == marker;
                for (auto& p : parts) p = rewrite(p);
                if (drop) parts.pop_back();
                return join_with_separator(parts);
            });
            const auto result = decode_chunked(doc, hyps, backend, 4);
            expect(result.fallback_count == chunks[bad].range.size(),
                   "fallback_count " + std::to_string(result.fallback_count) + " for n=" + std::to_string(n));
            for (std::size_t i = 0; i < n; ++i) {
                const bool in_bad = chunks[bad].range.contains(i);
                expect(result.outputs[i].text == (in_bad ? hyps[i] : rewrite(hyps[i])), "output " + std::to_string(i));
                expect((result.outputs[i].provenance == Provenance::NMTFallback) == in_bad, "provenance");
            }
            ++checked;
        }
        return std::to_string(checked) + " fixtures";
    });
}

std::string batched_last_part() {
    return timed_strategy([] {
        for (std::size_t n = 5; n <= 20; ++n) {
            const auto doc = testing::numbered_document("d", n);
            const auto hyps = testing::numbered(n, "h");
            testing::FunctionBackend backend([](const CompletionRequest& r) {
                auto parts = hypothesis_parts(r.prompt);
                for (std::size_t k = 0; k + 1 < parts.size(); ++k) parts[k] = "junk" + std::to_string(k);
                parts.back() = rewrite(parts.back());
                return join_with_separator(parts);
            });
            const auto result = decode_batched_sw(doc, hyps, backend, 3);
            expect(backend.calls() == n, "calls");
            expect(result.texts() == testing::numbered(n, "p"), "wrong part kept for n=" + std::to_string(n));
        }
        return std::string("n=5..20");
    });
}

std::string continuous_causal() {
    return timed_strategy([] {
        auto scripted = testing::context_sensitive();
        for (std::size_t n = 5; n <= 20; ++n) {
            const auto doc = testing::numbered_document("d", n);
            const auto hyps = testing::numbered(n, "h");
            testing::FunctionBackend backend([&](const CompletionRequest& r) { return scripted.complete(r).text; });
            const auto result = decode_continuous_sw(doc, hyps, backend, 5);
            const auto requests = backend.requests();
            expect(requests.size() == n, "calls " + std::to_string(requests.size()) + " != " + std::to_string(n));
            for (std::size_t i = 0; i < n; ++i) {
                for (auto k = i + 1; k < n; ++k) {
                    expect(requests[i].prompt.find("h" + std::to_string(k)) == std::string::npos, "future hyp visible");
                    expect(requests[i].prompt.find(" s" + std::to_string(k) + " ") == std::string::npos,
                           "future source visible");
                }
                const auto window = left_context_window(doc.token_counts(), i, 5);
                std::vector<std::string> prefix;
                for (auto k = window.start; k < i; ++k) prefix.push_back(result.outputs[k].text);
                expect(requests[i].forced_prefix == (prefix.empty() ? "" : join_with_separator(prefix) + " <SS>"),
                       "forced prefix at " + std::to_string(i));
            }
        }
        const double s = std::chrono::duration<double>(strategies_time).count();
        expect(s < kStrategiesBudgetS, "strategies took " + fmt(s) + "s");
        return "strategies total " + fmt(s) + "s";
    });
}

Session new_session(std::size_t n, CompletionBackend& llm, std::size_t limit) {
    testing::NumberTranslator nmt;
    return create_session("s", testing::numbered_document("d", n), Strategy{StrategyKind::ContinuousSW, limit},
                          SessionBackends{nmt, llm, "nmt", "llm"});
}

std::string manual_pe_invariants() {
    auto llm = testing::context_sensitive();
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 5 + rng() % 16;
        const std::size_t limit = 3 + rng() % 8;
        auto a = new_session(n, llm, limit);
        auto b = new_session(n, llm, limit);
        std::map<std::size_t, std::string> human;
        for (int e = 0; e < 5; ++e) {
            const std::size_t k = rng() % n;
            const std::string text = (rng() % 2 ? "g" : "e") + std::to_string(rng() % 50);
            const auto before = a.outputs;
            apply_edit(a, k, text, llm);
            apply_edit(b, k, text, llm);
            human[k] = text;
            for (std::size_t i = 0; i < k; ++i) expect(a.outputs[i] == before[i], "prefix changed");
            for (const auto& [idx, t] : human) {
                expect(a.outputs[idx] == SentenceOutput{t, Provenance::Human}, "human row overwritten");
            }
        }
        expect(a == b, "replay diverged");
    }
    return "40 random edit sequences";
}

std::string manual_pe_effort() {
    auto llm = testing::context_sensitive();
    const std::size_t n = 10;
    auto s = new_session(n, llm, 256);
    const auto refs = testing::numbered(n, "g");
    const auto before = edit_effort(s.output_texts(), refs).total;
    apply_edit(s, 0, refs[0], llm);
    const auto after = edit_effort(s.output_texts(), refs).total;
    expect(after < before, "effort " + std::to_string(before) + " -> " + std::to_string(after));
    return "effort " + std::to_string(before) + " -> " + std::to_string(after);
}

std::vector<ParallelDocument> random_corpus(std::mt19937_64& rng, std::size_t docs) {
    std::vector<ParallelDocument> corpus;
    for (std::size_t d = 0; d < docs; ++d) {
        std::vector<std::string> src, ref;
        for (std::size_t i = 0, n = 1 + rng() % 8; i < n; ++i) {
            src.push_back(testing::random_sentence(rng, 1 + rng() % 10));
            ref.push_back("r" + std::to_string(d) + "_" + std::to_string(i));
        }
        corpus.push_back({make_document("doc" + std::to_string(d), src), make_document("doc" + std::to_string(d), ref)});
    }
    return corpus;
}

std::string datagen_partition() {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t docs = 2 + rng() % 50;
        const auto corpus = random_corpus(rng, docs);
        const auto halves = partition_corpus(corpus, rng());
        std::multiset<std::string> seen;
        std::set<std::string> a;
        for (const auto& d : halves.a) {
            seen.insert(d.doc_id());
            a.insert(d.doc_id());
        }
        for (const auto& d : halves.b) {
            expect(!a.count(d.doc_id()), "document in both halves");
            seen.insert(d.doc_id());
        }
        expect(seen.size() == docs && std::set<std::string>(seen.begin(), seen.end()).size() == docs, "not a cover");
        expect(halves.a.size() - halves.b.size() <= 1, "unbalanced");
    }
    return "300 random corpora";
}

std::string datagen_cross() {
    std::mt19937_64 rng(10);
    const auto corpus = random_corpus(rng, 17);
    const auto halves = partition_corpus(corpus, 3);
    testing::MarkerTranslator on_a("<trained-on-A>"), on_b("<trained-on-B>");
    const auto out = cross_translate(halves.a, halves.b, on_a, on_b, {.parallelism = 4});
    std::set<std::string> a;
    for (const auto& d : halves.a) a.insert(d.doc_id());
    for (const auto& t : out.triples) {
        const auto& marker = a.count(t.doc_id) ? "<trained-on-B> " : "<trained-on-A> ";
        expect(t.hypothesis == marker + t.source, "misrouted " + t.doc_id);
    }
    std::size_t sentences = 0;
    for (const auto& d : corpus) sentences += d.size();
    expect(out.dropped.empty(), "drops");
    expect(out.triples.size() == sentences,
           std::to_string(out.triples.size()) + " triples for " + std::to_string(sentences) + " sentences");
    return std::to_string(sentences) + " triples";
}

std::string metrics_bleu() {
    const std::vector<std::string> refs{"Das ist ein Test .", "Noch ein längerer Satz , bitte ."};
    const double identity = corpus_bleu(refs, refs);
    expect(std::abs(identity - 100.0) <= kBleuIdentityTol, "identity " + fmt(identity));
    expect(corpus_bleu({"p q r s"}, {"a b c d"}) == 0.0, "zero precision not 0");
    const std::vector<std::string> h{"a b c"}, r{"a b c d"};
    const double got = corpus_bleu(h, r, BleuSmoothing::AddOne);
    const double want = oracle::bleu(h, r, true);
    expect(std::abs(got - want) <= kOracleTol, "add-one " + fmt(got) + " vs oracle " + fmt(want));
    return "add-one short case " + fmt(got);
}

std::string metrics_chrf() {
    const std::vector<std::string> refs{"Das ist ein Test .", "zwei"};
    expect(std::abs(chrf2(refs, refs) - 100.0) <= kOracleTol, "identity");
    const double got = chrf2({"abc"}, {"abd"});
    const double want = oracle::chrf2({"abc"}, {"abd"});
    expect(std::abs(got - want) <= kOracleTol, fmt(got) + " vs oracle " + fmt(want));
    return "abc/abd " + fmt(got);
}

std::string metrics_tags() {
    const auto s = tag_prf({{Phenomenon::Pronoun, 0, 0, "Er"}, {Phenomenon::Pronoun, 0, 3, "Er"}},
                           {{Phenomenon::Pronoun, 0, 0, "Er"}})
                       .at(Phenomenon::Pronoun);
    expect(s.precision == 0.5 && s.recall == 1.0, "p/r");
    expect(std::abs(s.f1 - 2.0 / 3.0) < 1e-15, "f1 " + fmt(s.f1));
    return "p 0.5 r 1 f1 " + fmt(s.f1);
}

ContrastiveInstance contrastive_instance(std::size_t correct) {
    ContrastiveInstance inst;
    inst.src_context = {"The bike is old ."};
    inst.tgt_context_hyps = std::vector<std::string>{"Das Fahrrad ist alt ."};
    inst.src = "It is red .";
    inst.src_hyp = "Es ist rot .";
    inst.candidates = {"Er ist rot .", "Es ist rot .", "Sie ist rot ."};
    inst.correct_index = correct;
    return inst;
}

std::string contrastive_argmax() {
    expect(argmax_first({-3.0, -1.0, -2.0}) == 1, "argmax");
    expect(argmax_first({-1.0, -1.0, -2.0}) == 0, "tie");
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-30.0, 0.0);
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> s;
        for (std::size_t k = 0, n = 2 + rng() % 5; k < n; ++k) s.push_back(rng() % 4 ? u(rng) : -1.0);
        const auto best = argmax_first(s);
        auto shifted = s;
        const double c = u(rng) * 10.0;
        for (auto& x : shifted) x += c;
        expect(argmax_first(shifted) == best, "shift changed the choice");
    }
    return "1000 shifted score vectors";
}

std::string contrastive_benchmarks() {
    ScriptedBackend scorer;
    scorer.set_logprob("Es", -0.2);
    scorer.set_logprob("Er", -2.0);
    scorer.set_logprob("Sie", -2.5);
    std::vector<ContrastiveInstance> perfect(8, contrastive_instance(1)), half;
    for (int i = 0; i < 8; ++i) half.push_back(contrastive_instance(i % 2 ? 1 : 0));
    const auto a = run_benchmark(perfect, nullptr, scorer, 1).accuracy;
    const auto b = run_benchmark(half, nullptr, scorer, 1, 4).accuracy;
    expect(a == 1.0, "perfect benchmark " + fmt(a));
    expect(b == 0.5, "half benchmark " + fmt(b));
    const auto none = score_instance(contrastive_instance(1), nullptr, scorer, 0);
    expect(none.prompt == render_doc_ape({"It is red ."}, {"Es ist rot ."}).prompt_text, "ctx 0 prompt has context");
    return "1.0 / 0.5, ctx 0 empty";
}

// ---------------------------------------------------------------------------------------------

json get_json(httplib::Client& c, const std::string& path, int* status = nullptr) {
    auto r = c.Get(path);
    expect(static_cast<bool>(r), "GET " + path + " failed");
    if (status) *status = r->status;
    return json::parse(r->body);
}

json post_json(httplib::Client& c, const std::string& path, const json& body, int expected) {
    auto r = c.Post(path, body.dump(), "application/json");
    expect(static_cast<bool>(r), "POST " + path + " failed");
    expect(r->status == expected, "POST " + path + " -> " + std::to_string(r->status) + " " + r->body);
    return json::parse(r->body);
}

std::string service_round_trip() {
    const auto start = Clock::now();
    testing::TempDir dir;
    testing::SessionBackendsFixture backends(3ms);
    SessionManager manager(backends.registry, {dir.path(), {}, {}});
    ApiServer server(manager);
    const int port = server.bind("127.0.0.1", 0);
    expect(port > 0, "bind failed");
    std::thread thread([&] { server.listen(); });
    server.wait_until_ready();
    std::string detail;
    try {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(10, 0);
        const std::size_t n = 12;
        const json create{{"session_id", "acc"},
                          {"document", {{"doc_id", "doc"}, {"sentences", testing::numbered(n, "s")}}},
                          {"strategy", "continuous-sw"},
                          {"chunk_limit", 6},
                          {"backends", {{"nmt", "nmt"}, {"llm", "llm"}}}};
        expect(post_json(c, "/api/sessions", create, 201)["revision"] == 1, "create revision");
        const auto refs = testing::numbered(n, "g");
        const auto before = post_json(c, "/api/sessions/acc/metrics", {{"references", refs}}, 200);

        std::uint64_t last = 1;
        for (const auto& [k, t] : std::vector<std::pair<int, std::string>>{{0, "g0"}, {5, "g5"}, {2, "x"}}) {
            const auto rev = post_json(c, "/api/sessions/acc/edits", {{"index", k}, {"text", t}}, 202)["revision"];
            expect(rev.get<std::uint64_t>() == last + 1, "edit revision");
            last = rev.get<std::uint64_t>();
        }
        std::uint64_t observed = 0;
        json view;
        const auto deadline = Clock::now() + 20s;
        while (true) {
            view = get_json(c, "/api/sessions/acc");
            const auto rev = view["revision"].get<std::uint64_t>();
            expect(rev >= observed, "revision went backwards");
            observed = rev;
            if (view["settled"].get<bool>()) break;
            expect(Clock::now() < deadline, "did not settle");
            std::this_thread::sleep_for(5ms);
        }
        expect(observed == 4, "final revision " + std::to_string(observed));
        const auto unchanged = get_json(c, "/api/sessions/acc?since=4");
        expect(unchanged["unchanged"] == true && unchanged["sentences"].empty(), "since delta");

        const auto after = post_json(c, "/api/sessions/acc/metrics", {{"references", refs}}, 200);
        const auto b = before["edit_effort"]["total"].get<std::size_t>();
        const auto a = after["edit_effort"]["total"].get<std::size_t>();
        expect(a < b, "edit effort " + std::to_string(b) + " -> " + std::to_string(a));
        expect(after.contains("bleu") && after.contains("chrf2") && after.contains("tags"), "metric fields");
        detail = "revision 4, effort " + std::to_string(b) + " -> " + std::to_string(a);
    } catch (...) {
        server.stop();
        thread.join();
        throw;
    }
    server.stop();
    thread.join();
    const double s = elapsed(start);
    expect(s < kServiceBudgetS, "took " + fmt(s) + "s");
    return detail;
}

std::string crash_safe_persistence() {
    testing::TempDir dir;
    const pid_t child = fork();
    expect(child >= 0, "fork failed");
    if (child == 0) {
        testing::SessionBackendsFixture backends;
        bool armed = false;
        PersistHooks hooks;
        hooks.before_rename = [&](const std::filesystem::path&) {
            if (armed) ::kill(::getpid(), SIGKILL);
        };
        SessionManager manager(backends.registry, {dir.path(), {}, hooks});
        manager.create({"crash", testing::numbered_document("doc", 6), {}, "nmt", "llm"});
        armed = true;
        manager.edit("crash", 0, "g0");
        _exit(0);
    }
    int status = 0;
    expect(waitpid(child, &status, 0) == child, "waitpid");
    expect(WIFSIGNALED(status) && WTERMSIG(status) == SIGKILL, "child was not killed mid-write");

    const auto stored = load_session("crash", dir.path());
    expect(stored.session.revision == 1, "stored revision " + std::to_string(stored.session.revision));
    testing::SessionBackendsFixture backends;
    SessionManager manager(backends.registry, {dir.path(), {}, {}});
    expect(manager.resume() == 1, "resume");
    const auto snap = manager.get("crash");
    expect(snap->session.revision == 1 && snap->session.settled(), "prior state not intact");
    expect(manager.edit("crash", 0, "g0") == 2, "edit after recovery");
    return "prior revision 1 loadable after SIGKILL";
}

}  // namespace

int main() {
    criterion("chunker: invariants on 1000 random documents, limits 256/1024, < 5 s", chunker);
    criterion("prompts: byte-exact goldens for all five templates", prompt_goldens);
    criterion("prompts: mask consistency over 100 random triples", mask_consistency);
    criterion("strategies: chunked mismatch falls back to the whole chunk", chunked_fallback);
    criterion("strategies: batched sliding window extracts the last part", batched_last_part);
    criterion("strategies: continuous sliding window is causal with n calls, total < 10 s", continuous_causal);
    criterion("manual-pe: prefix preservation, human immutability, replay determinism", manual_pe_invariants);
    criterion("manual-pe: gold edit strictly lowers edit effort", manual_pe_effort);
    criterion("datagen: partition disjointness and coverage", datagen_partition);
    criterion("datagen: cross routing and triple count", datagen_cross);
    criterion("metrics: BLEU identity, zero precision, add-one oracle case", metrics_bleu);
    criterion("metrics: ChrF2 identity and abc/abd oracle case", metrics_chrf);
    criterion("metrics: tag P/R/F1 multiset example", metrics_tags);
    criterion("contrastive: argmax, ties and shift invariance", contrastive_argmax);
    criterion("contrastive: scripted 100%/50% benchmarks and empty ctx 0", contrastive_benchmarks);
    criterion("service: crash between temp write and rename keeps prior state", crash_safe_persistence);
    criterion("service: HTTP round trip with monotone revisions, < 30 s", service_round_trip);
    std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " failure(s)" << std::endl;
    return failures == 0 ? 0 : 1;
}
