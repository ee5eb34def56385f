#pragma once

#include "docape/backend.hpp"
#include "docape/config.hpp"
#include "docape/scripted_backend.hpp"
#include "docape/error.hpp"
#include "docape/text.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace docape::testing {

/// Completion backend answering through a callback; records every request.
class FunctionBackend : public CompletionBackend {
public:
    using Fn = std::function<std::string(const CompletionRequest&)>;
    explicit FunctionBackend(Fn fn) : fn_(std::move(fn)) {}

    CompletionResult complete(const CompletionRequest& request) override {
        {
            std::lock_guard lock(mutex_);
            requests_.push_back(request);
        }
        return finalize_completion(fn_(request), request.stop_sequences, request.max_new_tokens);
    }

    std::vector<CompletionRequest> requests() const {
        std::lock_guard lock(mutex_);
        return requests_;
    }
    std::size_t calls() const {
        std::lock_guard lock(mutex_);
        return requests_.size();
    }

private:
    Fn fn_;
    mutable std::mutex mutex_;
    std::vector<CompletionRequest> requests_;
};

/// Every call fails with a transient remote error.
class FailingBackend : public CompletionBackend {
public:
    CompletionResult complete(const CompletionRequest&) override {
        ++calls;
        throw Error(ErrorCode::RemoteError, "backend down");
    }
    std::atomic<std::size_t> calls{0};
};

/// Translation backend that tags its output, so routing is visible in the result.
class MarkerTranslator : public TranslationBackend {
public:
    explicit MarkerTranslator(std::string marker) : marker_(std::move(marker)) {}
    std::string translate_text(const std::string& source) override {
        ++calls;
        return marker_ + " " + source;
    }
    std::atomic<std::size_t> calls{0};

private:
    std::string marker_;
};

class TempDir {
public:
    TempDir() {
        std::string pattern = (std::filesystem::temp_directory_path() / "docape-test-XXXXXX").string();
        if (!mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
        path_ = pattern;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string random_sentence(std::mt19937_64& rng, std::size_t tokens) {
    std::string s;
    for (std::size_t t = 0; t < tokens; ++t) {
        if (t) s += ' ';
        s += "w" + std::to_string(rng() % 1000);
    }
    return s;
}

/// Sentences of 1..max_tokens tokens, occasionally longer than any limit under test.
inline Document random_document(std::mt19937_64& rng, const std::string& id, std::size_t max_sentences,
                                std::size_t max_tokens) {
    const std::size_t n = 1 + rng() % max_sentences;
    std::vector<std::string> sentences;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t tokens = 1 + rng() % max_tokens;
        if (rng() % 50 == 0) tokens = 1100 + rng() % 200;
        sentences.push_back(random_sentence(rng, tokens));
    }
    return make_document(id, sentences);
}

/// Document "s0 ... s{n-1}" with NMT hypotheses "h0 ... h{n-1}".
inline Document numbered_document(const std::string& id, std::size_t n, const std::string& word = "s") {
    std::vector<std::string> sentences;
    for (std::size_t i = 0; i < n; ++i) sentences.push_back(word + std::to_string(i));
    return make_document(id, sentences);
}

inline std::vector<std::string> numbered(std::size_t n, const std::string& word) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(word + std::to_string(i));
    return out;
}

/// "sN" translates to "hN".
class NumberTranslator : public TranslationBackend {
public:
    std::string translate_text(const std::string& source) override { return "h" + source.substr(1); }
};

/// Produces "gN" once any gold target "gK" is force-decoded, "pN" otherwise.
inline ScriptedBackend context_sensitive() {
    ScriptedBackend b;
    b.add_rule("h(\\d+)", "g$1", "g\\d");
    b.add_rule("h(\\d+)", "p$1");
    return b;
}

/// Wraps a backend and sleeps before every completion.
class SlowBackend : public CompletionBackend {
public:
    SlowBackend(CompletionBackend& inner, std::chrono::milliseconds delay) : inner_(inner), delay_(delay) {}
    CompletionResult complete(const CompletionRequest& request) override {
        ++calls;
        std::this_thread::sleep_for(delay_);
        return inner_.complete(request);
    }
    std::atomic<std::size_t> calls{0};

private:
    CompletionBackend& inner_;
    std::chrono::milliseconds delay_;
};

/// Registers "nmt" (NumberTranslator) and "llm" (context_sensitive, optionally slowed down).
struct SessionBackendsFixture {
    std::shared_ptr<NumberTranslator> nmt = std::make_shared<NumberTranslator>();
    std::shared_ptr<ScriptedBackend> scripted = std::make_shared<ScriptedBackend>(context_sensitive());
    std::shared_ptr<SlowBackend> llm;
    BackendRegistry registry;

    explicit SessionBackendsFixture(std::chrono::milliseconds delay = std::chrono::milliseconds(0))
        : llm(std::make_shared<SlowBackend>(*scripted, delay)) {
        BackendDescriptor n;
        n.name = "nmt";
        n.kind = BackendKind::Translation;
        n.endpoint = "memory";
        registry.add(n, nmt, nullptr, nmt.get(), nullptr);
        BackendDescriptor l;
        l.name = "llm";
        l.kind = BackendKind::Completion;
        l.endpoint = "memory";
        registry.add(l, llm, llm.get(), nullptr, nullptr);
    }
};

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(DOCAPE_FIXTURES) / name; }

}  // namespace docape::testing
