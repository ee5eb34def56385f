#include "docape/scripted_backend.hpp"

#include "docape/corpus_io.hpp"
#include "docape/error.hpp"
#include "docape/prompts.hpp"
#include "docape/util.hpp"

#include <fstream>

namespace docape {

using nlohmann::json;

namespace {

constexpr std::string_view kHypothesisLine = "\nGerman Translation: ";

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::regex compile(const std::string& pattern, std::size_t line_no) {
    try {
        return std::regex(pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
        throw Error(ErrorCode::ParseError, "bad regex at line " + std::to_string(line_no) + ": " + e.what(),
                    std::to_string(line_no));
    }
}

}  // namespace

ScriptedBackend::ScriptedBackend(ScriptedBackend&& other) noexcept { *this = std::move(other); }

ScriptedBackend& ScriptedBackend::operator=(ScriptedBackend&& other) noexcept {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_, other.mutex_);
    by_digest_ = std::move(other.by_digest_);
    rules_ = std::move(other.rules_);
    failures_ = std::move(other.failures_);
    logprobs_ = std::move(other.logprobs_);
    default_logprob_ = other.default_logprob_;
    has_logprob_table_ = other.has_logprob_table_;
    dictionary_ = std::move(other.dictionary_);
    translation_prefix_ = std::move(other.translation_prefix_);
    translation_failures_ = std::move(other.translation_failures_);
    embeddings_ = std::move(other.embeddings_);
    calls_ = other.calls_;
    return *this;
}

ScriptedBackend ScriptedBackend::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open scripted backend fixture", path.string());
    return parse(in);
}

ScriptedBackend ScriptedBackend::parse(std::istream& in) {
    ScriptedBackend backend;
    for_each_jsonl(in, [&](const json& r, std::size_t line_no) {
        auto bad = [&](const std::string& why) {
            return Error(ErrorCode::ParseError, "scripted fixture line " + std::to_string(line_no) + ": " + why,
                         std::to_string(line_no));
        };
        if (!r.is_object()) throw bad("record is not an object");
        try {
            if (r.contains("digest")) {
                Scripted s{r.at("response").get<std::string>(), FinishReason::Stop};
                if (r.value("finish_reason", std::string("stop")) == "length") s.finish = FinishReason::Length;
                backend.by_digest_[r.at("digest").get<std::string>()] = std::move(s);
            } else if (r.contains("prompt")) {
                Scripted s{r.at("response").get<std::string>(), FinishReason::Stop};
                if (r.value("finish_reason", std::string("stop")) == "length") s.finish = FinishReason::Length;
                backend.by_digest_[sha256_hex(r.at("prompt").get<std::string>())] = std::move(s);
            } else if (r.contains("rule")) {
                Rule rule;
                rule.pattern_text = r.at("rule").get<std::string>();
                rule.pattern = compile(rule.pattern_text, line_no);
                rule.replacement = r.at("response").get<std::string>();
                if (r.contains("when_prefix")) rule.when_prefix = compile(r.at("when_prefix").get<std::string>(), line_no);
                if (r.contains("when_prompt")) rule.when_prompt = compile(r.at("when_prompt").get<std::string>(), line_no);
                backend.rules_.push_back(std::move(rule));
            } else if (r.contains("fail")) {
                backend.failures_.push_back(compile(r.at("fail").get<std::string>(), line_no));
            } else if (r.contains("logprobs")) {
                backend.has_logprob_table_ = true;
                for (const auto& [token, lp] : r.at("logprobs").items()) backend.logprobs_[token] = lp.get<double>();
                backend.default_logprob_ = r.value("default_logprob", backend.default_logprob_);
            } else if (r.contains("translate")) {
                for (const auto& [word, target] : r.at("translate").items()) {
                    backend.dictionary_[word] = target.get<std::string>();
                }
                backend.translation_prefix_ = r.value("prefix", backend.translation_prefix_);
                if (r.contains("fail_source")) {
                    backend.translation_failures_.push_back(compile(r.at("fail_source").get<std::string>(), line_no));
                }
                // An empty dictionary still marks the backend as able to translate.
                backend.dictionary_.emplace("", "");
            } else if (r.contains("embed")) {
                backend.embeddings_[r.at("embed").get<std::string>()] = r.at("vector").get<std::vector<double>>();
            } else {
                throw bad("unrecognised record");
            }
        } catch (const json::exception& e) {
            throw bad(e.what());
        }
    });
    return backend;
}

void ScriptedBackend::add_response(const std::string& full_prompt, std::string response) {
    std::lock_guard lock(mutex_);
    by_digest_[sha256_hex(full_prompt)] = Scripted{std::move(response), FinishReason::Stop};
}

void ScriptedBackend::add_rule(const std::string& pattern, std::string replacement, std::string when_prefix,
                               std::string when_prompt) {
    std::lock_guard lock(mutex_);
    Rule rule;
    rule.pattern_text = pattern;
    rule.pattern = compile(pattern, 0);
    rule.replacement = std::move(replacement);
    if (!when_prefix.empty()) rule.when_prefix = compile(when_prefix, 0);
    if (!when_prompt.empty()) rule.when_prompt = compile(when_prompt, 0);
    rules_.push_back(std::move(rule));
}

void ScriptedBackend::set_logprob(const std::string& token, double logprob) {
    std::lock_guard lock(mutex_);
    has_logprob_table_ = true;
    logprobs_[token] = logprob;
}

void ScriptedBackend::set_default_logprob(double logprob) {
    std::lock_guard lock(mutex_);
    has_logprob_table_ = true;
    default_logprob_ = logprob;
}

void ScriptedBackend::add_translation(const std::string& word, std::string target) {
    std::lock_guard lock(mutex_);
    dictionary_.emplace("", "");
    dictionary_[word] = std::move(target);
}

void ScriptedBackend::set_translation_prefix(std::string prefix) {
    std::lock_guard lock(mutex_);
    dictionary_.emplace("", "");
    translation_prefix_ = std::move(prefix);
}

std::size_t ScriptedBackend::call_count() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::optional<std::string> ScriptedBackend::apply_rules(const CompletionRequest& request) const {
    if (rules_.empty()) return std::nullopt;
    const auto& prompt = request.prompt;
    const auto label = prompt.rfind(kHypothesisLine);
    if (label == std::string::npos) return std::nullopt;
    const auto begin = label + kHypothesisLine.size();
    const auto end = prompt.find('\n', begin);
    std::string text = prompt.substr(begin, end == std::string::npos ? std::string::npos : end - begin);

    for (const auto& rule : rules_) {
        if (rule.when_prefix && !std::regex_search(request.forced_prefix, *rule.when_prefix)) continue;
        if (rule.when_prompt && !std::regex_search(prompt, *rule.when_prompt)) continue;
        text = std::regex_replace(text, rule.pattern, rule.replacement);
    }
    if (!request.forced_prefix.empty()) {
        const auto forced = split_on_separator(request.forced_prefix).size();
        auto parts = split_on_separator(text);
        if (parts.size() <= forced) return std::string{};
        parts.erase(parts.begin(), parts.begin() + static_cast<std::ptrdiff_t>(forced));
        text = join_with_separator(parts);
    }
    return text;
}

CompletionResult ScriptedBackend::complete(const CompletionRequest& request) {
    std::lock_guard lock(mutex_);
    ++calls_;
    const auto full = request.full_prompt();
    for (const auto& failure : failures_) {
        if (std::regex_search(full, failure)) throw Error(ErrorCode::RemoteError, "scripted failure");
    }

    std::optional<std::string> raw;
    FinishReason scripted_finish = FinishReason::Stop;
    const auto digest = sha256_hex(full);
    if (auto it = by_digest_.find(digest); it != by_digest_.end()) {
        raw = it->second.response;
        scripted_finish = it->second.finish;
    } else {
        raw = apply_rules(request);
    }
    if (!raw) throw Error(ErrorCode::RemoteError, "unscripted prompt", digest);

    auto result = finalize_completion(*raw, request.stop_sequences, request.max_new_tokens);
    if (scripted_finish == FinishReason::Length) result.finish_reason = FinishReason::Length;
    if (request.want_logprobs && has_logprob_table_) {
        std::vector<TokenLogprob> tokens;
        for (auto& [token, offset] : echo_tokens(result.text)) {
            auto it = logprobs_.find(std::string(trim(token)));
            tokens.push_back({token, it == logprobs_.end() ? default_logprob_ : it->second, offset});
        }
        result.token_logprobs = std::move(tokens);
    }
    return result;
}

std::vector<std::pair<std::string, std::size_t>> ScriptedBackend::echo_tokens(std::string_view text) {
    std::vector<std::pair<std::string, std::size_t>> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        const std::size_t start = i;
        while (i < text.size() && is_space(text[i])) ++i;
        while (i < text.size() && !is_space(text[i])) ++i;
        tokens.emplace_back(std::string(text.substr(start, i - start)), start);
    }
    return tokens;
}

std::vector<TokenLogprob> ScriptedBackend::echo_logprobs(const std::string& text) {
    std::lock_guard lock(mutex_);
    ++calls_;
    if (!has_logprob_table_) throw Error(ErrorCode::UnsupportedCapability, "scripted backend has no logprob table");
    std::vector<TokenLogprob> out;
    bool first = true;
    for (auto& [token, offset] : echo_tokens(text)) {
        TokenLogprob t{token, std::nullopt, offset};
        if (!first) {
            auto it = logprobs_.find(std::string(trim(token)));
            t.logprob = it == logprobs_.end() ? default_logprob_ : it->second;
        }
        first = false;
        out.push_back(std::move(t));
    }
    return out;
}

std::string ScriptedBackend::translate_text(const std::string& source) {
    std::lock_guard lock(mutex_);
    ++calls_;
    if (dictionary_.empty()) throw Error(ErrorCode::UnsupportedCapability, "scripted backend has no translation table");
    for (const auto& failure : translation_failures_) {
        if (std::regex_search(source, failure)) throw Error(ErrorCode::RemoteError, "scripted translation failure");
    }
    std::string out = translation_prefix_;
    std::size_t i = 0;
    while (i < source.size()) {
        if (is_space(source[i])) {
            out.push_back(source[i++]);
            continue;
        }
        std::size_t j = i;
        while (j < source.size() && !is_space(source[j])) ++j;
        const std::string word = source.substr(i, j - i);
        auto it = dictionary_.find(word);
        out += (it == dictionary_.end() || word.empty()) ? word : it->second;
        i = j;
    }
    return out;
}

std::vector<double> ScriptedBackend::embed(const std::string& text) {
    std::lock_guard lock(mutex_);
    ++calls_;
    auto it = embeddings_.find(text);
    if (it == embeddings_.end()) throw Error(ErrorCode::RemoteError, "no scripted embedding", text);
    return it->second;
}

}  // namespace docape
