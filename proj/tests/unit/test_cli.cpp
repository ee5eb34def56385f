#include "docape/cli.hpp"
#include "docape/corpus_io.hpp"
#include "docape/datagen.hpp"

#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

using namespace docape;
using nlohmann::json;

namespace {

struct Invocation {
    int code = -1;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    Invocation r;
    r.code = run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

void write(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<json> jsonl(const std::string& text) {
    std::vector<json> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) out.push_back(json::parse(line));
    }
    return out;
}

/// Workspace with a two-document corpus, hypotheses and scripted backends.
struct Workspace {
    testing::TempDir dir;
    std::string p(const std::string& name) const { return (dir / name).string(); }

    Workspace() {
        write(dir / "src.txt", "s0 a\ns1 b\ns2 c\n\ns3 d\ns4 e\n");
        write(dir / "hyps.txt", "h0\nh1\nh2\n\nh3\nh4\n");
        write(dir / "refs.txt", "g0\ng1\ng2\n\ng3\ng4\n");
        write(dir / "llm.jsonl", "{\"rule\": \"h(\\\\d+)\", \"response\": \"p$1\"}\n");
        write(dir / "down.jsonl", "{\"fail\": \".*\"}\n");
        write(dir / "nmt.jsonl", "{\"translate\": {\"a\": \"A\"}, \"prefix\": \"[x]\"}\n");
        write(dir / "config.toml",
              "[[backends]]\nname = \"llm\"\nkind = \"completion\"\nendpoint = \"scripted:llm.jsonl\"\n");
    }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 1") {
    CHECK(invoke({"--version"}).out == std::string(kVersion) + "\n");
    CHECK(invoke({}).code == kExitValidation);
    CHECK(invoke({"postedit", "--bogus"}).code == kExitValidation);
    CHECK(invoke({"postedit", "--in", "x"}).code == kExitValidation);
    CHECK(invoke({"export-train", "--triples", "t", "--kind", "paragraph"}).code == kExitValidation);
    CHECK(exit_code_for(ErrorCode::LengthMismatch) == kExitValidation);
    CHECK(exit_code_for(ErrorCode::Timeout) == kExitBackend);
}

TEST_CASE("postedit with a configured scripted backend writes outputs and a manifest") {
    Workspace w;
    const auto r = invoke({"--config", w.p("config.toml"), "postedit", "--strategy", "chunked", "--in", w.p("src.txt"),
                           "--hyps", w.p("hyps.txt"), "--backend", "llm", "--out", w.p("result.jsonl"), "--outputs",
                           w.p("out.txt"), "--jobs", "2"});
    INFO(r.err);
    REQUIRE(r.code == kExitOk);
    const auto records = jsonl(slurp(w.p("result.jsonl")));
    REQUIRE(records.size() == 2);
    CHECK(records[0]["fallback_count"] == 0);
    CHECK(records[1]["outputs"][1]["text"] == "p4");
    CHECK(slurp(w.p("out.txt")) == "p0\np1\np2\n\np3\np4\n");

    const auto manifest = json::parse(slurp(w.p("result.jsonl") + ".manifest.json"));
    CHECK(manifest["command"] == "postedit");
    CHECK(manifest["exit_code"] == 0);
    CHECK(manifest["inputs"].size() == 2);
    CHECK(manifest["inputs"][0]["sha256"].get<std::string>().size() == 64);
    CHECK(manifest["backends"][0].contains("fixture_sha256"));
    CHECK(manifest["strategy"]["kind"] == "chunked");
}

TEST_CASE("postedit reports a dead backend with exit 2 and NMT fallbacks") {
    Workspace w;
    for (const std::string strategy : {"sentence", "batched-sw", "continuous-sw"}) {
        const auto r = invoke({"postedit", "--strategy", strategy, "--in", w.p("src.txt"), "--hyps", w.p("hyps.txt"),
                               "--backend", "scripted:" + w.p("down.jsonl"), "--outputs", w.p("out.txt")});
        CHECK(r.code == kExitBackend);
        CHECK(slurp(w.p("out.txt")) == slurp(w.p("hyps.txt")));
        // No --out: records go to stdout and the manifest to stderr.
        CHECK(jsonl(r.out).size() == 2);
        CHECK(r.err.find("\"exit_code\":2") != std::string::npos);
    }
    CHECK(invoke({"postedit", "--in", w.p("src.txt"), "--hyps", w.p("hyps.txt"), "--backend", "ghost"}).code ==
          kExitBackend);
    CHECK(invoke({"postedit", "--in", w.p("src.txt"), "--hyps", w.p("refs.txt"), "--backend", "scripted:" + w.p("llm.jsonl"),
                  "--strategy", "chunked", "--gold-refs", w.p("refs.txt")})
              .code == kExitValidation);
}

TEST_CASE("gold references steer continuous decoding") {
    Workspace w;
    const auto r = invoke({"postedit", "--in", w.p("src.txt"), "--hyps", w.p("hyps.txt"), "--backend",
                           "scripted:" + w.p("llm.jsonl"), "--gold-refs", w.p("refs.txt"), "--out", w.p("r.jsonl")});
    REQUIRE(r.code == kExitOk);
    const auto diag = jsonl(slurp(w.p("r.jsonl")))[0]["diagnostics"];
    CHECK(diag.size() == 3);
}

TEST_CASE("translate, split, cross, export pipeline") {
    Workspace w;
    auto t = invoke({"translate", "--in", w.p("src.txt"), "--backend", "scripted:" + w.p("nmt.jsonl"), "--out",
                     w.p("nmt_out.txt")});
    INFO(t.err);
    REQUIRE(t.code == kExitOk);
    const auto translated = read_corpus(w.p("nmt_out.txt"));
    REQUIRE(translated.size() == 2);

    REQUIRE(invoke({"datagen-split", "--src", w.p("src.txt"), "--ref", w.p("refs.txt"), "--seed", "7", "--out-a",
                    w.p("a.jsonl"), "--out-b", w.p("b.jsonl")})
                .code == kExitOk);
    const auto a = jsonl(slurp(w.p("a.jsonl")));
    const auto b = jsonl(slurp(w.p("b.jsonl")));
    CHECK(a.size() == 1);
    CHECK(b.size() == 1);

    write(w.dir / "nmt_a.jsonl", "{\"translate\": {}, \"prefix\": \"[A]\"}\n");
    write(w.dir / "nmt_b.jsonl", "{\"translate\": {}, \"prefix\": \"[B]\"}\n");
    auto cross = invoke({"datagen-cross", "--a", w.p("a.jsonl"), "--b", w.p("b.jsonl"), "--model-a",
                         "scripted:" + w.p("nmt_a.jsonl"), "--model-b", "scripted:" + w.p("nmt_b.jsonl"), "--out",
                         w.p("triples.jsonl")});
    INFO(cross.err);
    REQUIRE(cross.code == kExitOk);
    std::ifstream tin(w.p("triples.jsonl"));
    const auto triples = read_triples(tin);
    CHECK(triples.size() == 5);
    for (const auto& tr : triples) {
        const bool in_a = tr.doc_id == a[0]["doc_id"].get<std::string>();
        CHECK(tr.hypothesis.rfind(in_a ? "[B]" : "[A]", 0) == 0);
    }

    REQUIRE(invoke({"export-train", "--triples", w.p("triples.jsonl"), "--kind", "doc", "--out", w.p("train.jsonl")})
                .code == kExitOk);
    const auto train = jsonl(slurp(w.p("train.jsonl")));
    CHECK(train.size() == 2);
    CHECK(train[0]["mask_anchor"] == "Post-Edited Translation:");
}

TEST_CASE("eval, tag, stats-chunks, contrapro") {
    Workspace w;
    auto e = invoke({"eval", "--hyps", w.p("refs.txt"), "--refs", w.p("refs.txt"), "--src", w.p("src.txt"),
                     "--smoothing", "add-one", "--comet", "0.8"});
    REQUIRE(e.code == kExitOk);
    const auto report = json::parse(e.out);
    CHECK(report["bleu"].get<double>() == doctest::Approx(100.0));
    CHECK(report["comet"] == 0.8);
    CHECK(invoke({"eval", "--hyps", w.p("refs.txt"), "--refs", w.p("missing.txt")}).code == kExitBackend);

    write(w.dir / "de.txt", "Das Fahrrad .\nKommen Sie !\n\nFahrrad\n");
    auto tg = invoke({"tag", "--in", w.p("de.txt")});
    REQUIRE(tg.code == kExitOk);
    const auto tags = jsonl(tg.out);
    REQUIRE(tags.size() == 2);
    CHECK(tags[0]["tags"].size() == 1);

    auto st = invoke({"stats-chunks", "--in", w.p("src.txt"), "--limits", "4,1024"});
    REQUIRE(st.code == kExitOk);
    const auto stats = json::parse(st.out);
    CHECK(stats["documents"] == 2);
    CHECK(stats["limits"]["4"]["chunks"] == 3);
    CHECK(stats["limits"]["1024"]["sentences_per_chunk"]["3"] == 1);

    write(w.dir / "lp.jsonl", "{\"logprobs\": {\"Sie\": -0.1, \"Er\": -3.0}}\n");
    write(w.dir / "cp.jsonl",
          "{\"src_context\": [\"The cat .\"], \"tgt_context_hyps\": [\"Die Katze .\"], \"src\": \"It sleeps .\", "
          "\"src_hyp\": \"Es schläft .\", \"candidates\": [\"Er schläft .\", \"Sie schläft .\"], \"correct_index\": 1}\n");
    auto cp = invoke({"contrapro", "--in", w.p("cp.jsonl"), "--backend", "scripted:" + w.p("lp.jsonl"), "--ctx-size", "1"});
    INFO(cp.err);
    REQUIRE(cp.code == kExitOk);
    CHECK(json::parse(cp.out)["accuracy"] == 1.0);
}

}
