#include "docape/http_backend.hpp"

#include "docape/error.hpp"

#include <httplib.h>

#include <algorithm>

namespace docape {

using nlohmann::json;

namespace {

/// Releases an in-flight slot on scope exit.
class SlotGuard {
public:
    explicit SlotGuard(std::counting_semaphore<1024>& sem) : sem_(sem) { sem_.acquire(); }
    ~SlotGuard() { sem_.release(); }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;

private:
    std::counting_semaphore<1024>& sem_;
};

}  // namespace

HttpBackend::HttpBackend(BackendDescriptor descriptor, RetryPolicy retry)
    : descriptor_(std::move(descriptor)),
      retry_(std::move(retry)),
      in_flight_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(descriptor_.max_in_flight, 1, 1024))) {
    retry_.max_retries = descriptor_.max_retries;
    const auto& url = descriptor_.endpoint;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::InvalidArgument, "backend endpoint is not an http URL", url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    scheme_host_port_ = url.substr(0, path_start);
    if (path_start != std::string::npos) path_prefix_ = url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

json HttpBackend::completion_body(const std::string& model, const CompletionRequest& request) {
    json body{{"model", model},
              {"prompt", request.full_prompt()},
              {"max_tokens", request.max_new_tokens},
              {"temperature", request.temperature},
              {"stop", request.stop_sequences},
              {"echo", false}};
    if (request.want_logprobs) body["logprobs"] = 1;
    return body;
}

json HttpBackend::echo_body(const std::string& model, const std::string& text) {
    return json{{"model", model},  {"prompt", text}, {"max_tokens", 0},
                {"temperature", 0.0}, {"logprobs", 1}, {"echo", true}};
}

std::vector<TokenLogprob> HttpBackend::parse_logprobs(const json& logprobs) {
    try {
        const auto& tokens = logprobs.at("tokens");
        const auto& values = logprobs.at("token_logprobs");
        const auto& offsets = logprobs.at("text_offset");
        if (tokens.size() != values.size() || tokens.size() != offsets.size()) {
            throw Error(ErrorCode::ProtocolError, "logprob arrays have different lengths");
        }
        std::vector<TokenLogprob> out;
        out.reserve(tokens.size());
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            TokenLogprob t;
            t.token = tokens[i].get<std::string>();
            if (!values[i].is_null()) t.logprob = values[i].get<double>();
            t.offset = offsets[i].get<std::size_t>();
            out.push_back(std::move(t));
        }
        return out;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ProtocolError, std::string("malformed logprobs: ") + e.what());
    }
}

json HttpBackend::post(const std::string& path, const json& body) {
    SlotGuard slot(in_flight_);
    return with_retries(retry_, [&] {
        httplib::Client client(scheme_host_port_);
        const auto seconds = descriptor_.timeout.count() / 1000;
        const auto micros = (descriptor_.timeout.count() % 1000) * 1000;
        client.set_connection_timeout(seconds, micros);
        client.set_read_timeout(seconds, micros);
        client.set_write_timeout(seconds, micros);
        auto res = client.Post(path_prefix_ + path, body.dump(), "application/json");
        if (!res) {
            const auto err = res.error();
            if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
                throw Error(ErrorCode::Timeout, "request to " + descriptor_.name + " timed out", httplib::to_string(err));
            }
            throw Error(ErrorCode::RemoteError, "request to " + descriptor_.name + " failed", httplib::to_string(err));
        }
        if (res->status != 200) {
            throw Error(ErrorCode::RemoteError,
                        descriptor_.name + " answered HTTP " + std::to_string(res->status), res->body);
        }
        try {
            return json::parse(res->body);
        } catch (const json::parse_error&) {
            throw Error(ErrorCode::ProtocolError, descriptor_.name + " returned invalid JSON", res->body);
        }
    });
}

CompletionResult HttpBackend::complete(const CompletionRequest& request) {
    const auto response = post("/v1/completions", completion_body(descriptor_.model_id, request));
    try {
        const auto& choice = response.at("choices").at(0);
        const auto text = choice.at("text").get<std::string>();
        // Servers already stop, but some return the matched stop string; truncate again client-side.
        auto result = finalize_completion(text, request.stop_sequences);
        if (choice.contains("finish_reason") && choice.at("finish_reason").is_string() &&
            choice.at("finish_reason").get<std::string>() == "length") {
            result.finish_reason = FinishReason::Length;
        }
        if (request.want_logprobs && choice.contains("logprobs") && !choice.at("logprobs").is_null()) {
            result.token_logprobs = parse_logprobs(choice.at("logprobs"));
        }
        return result;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ProtocolError, std::string("unexpected completion response: ") + e.what());
    }
}

std::vector<TokenLogprob> HttpBackend::echo_logprobs(const std::string& text) {
    const auto response = post("/v1/completions", echo_body(descriptor_.model_id, text));
    try {
        const auto& choice = response.at("choices").at(0);
        if (!choice.contains("logprobs") || choice.at("logprobs").is_null()) {
            throw Error(ErrorCode::UnsupportedCapability, descriptor_.name + " does not echo logprobs");
        }
        return parse_logprobs(choice.at("logprobs"));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ProtocolError, std::string("unexpected echo response: ") + e.what());
    }
}

std::string HttpBackend::translate_text(const std::string& source) {
    CompletionRequest request;
    request.prompt = source;
    request.max_new_tokens = 2 * count_tokens(source) + 32;
    request.stop_sequences = {"\n"};
    return complete(request).text;
}

std::vector<double> HttpBackend::embed(const std::string& text) {
    const auto response = post("/v1/embeddings", json{{"model", descriptor_.model_id}, {"input", text}});
    try {
        return response.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ProtocolError, std::string("unexpected embedding response: ") + e.what());
    }
}

}  // namespace docape
