#include "docape/service.hpp"

#include "docape/error.hpp"
#include "docape/metrics.hpp"

#include <httplib.h>

#include <charconv>

namespace docape {

using nlohmann::json;

int http_status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotFound: return 404;
        case ErrorCode::AlreadyExists: return 409;
        case ErrorCode::InvalidArgument:
        case ErrorCode::EmptyField:
        case ErrorCode::LengthMismatch:
        case ErrorCode::IndexOutOfRange:
        case ErrorCode::ParseError:
        case ErrorCode::TooSmall:
        case ErrorCode::EmptyCorpus: return 400;
        case ErrorCode::BackendUnavailable:
        case ErrorCode::RemoteError:
        case ErrorCode::ProtocolError:
        case ErrorCode::UnsupportedCapability: return 502;
        case ErrorCode::Timeout: return 504;
        default: return 500;
    }
}

json error_body(const Error& error) {
    return json{{"code", std::string(to_string(error.code()))}, {"message", error.what()}, {"detail", error.detail()}};
}

json session_view(const PersistedSession& persisted, std::optional<std::uint64_t> since) {
    const auto& s = persisted.session;
    json out{{"session_id", s.session_id},
             {"doc_id", s.doc.doc_id},
             {"revision", s.revision},
             {"settled", s.settled()},
             {"strategy", std::string(to_string(s.strategy.kind))},
             {"chunk_limit", s.strategy.chunk_limit},
             {"backends", {{"nmt", s.nmt_backend}, {"llm", s.llm_backend}}},
             {"updated_at", persisted.updated_at}};
    json rows = json::array();
    if (since && *since == s.revision && s.settled()) {
        out["unchanged"] = true;
    } else {
        out["unchanged"] = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            rows.push_back({{"index", i},
                            {"src", s.doc.sentences[i].text},
                            {"nmt_hyp", s.nmt_hyps[i]},
                            {"output", s.outputs[i].text},
                            {"status", std::string(to_string(s.status[i]))},
                            {"provenance", std::string(to_string(s.outputs[i].provenance))}});
        }
    }
    out["sentences"] = std::move(rows);
    return out;
}

namespace {

json parse_body(const httplib::Request& req) {
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("request body is not valid JSON: ") + e.what(),
                    std::to_string(e.byte));
    }
}

void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

CreateSessionRequest create_request_from(const json& body) {
    CreateSessionRequest request;
    request.session_id = body.value("session_id", std::string());
    const auto& document = body.at("document");
    std::vector<std::string> sentences;
    std::string doc_id = "doc";
    if (document.is_array()) {
        sentences = document.get<std::vector<std::string>>();
    } else {
        sentences = document.at("sentences").get<std::vector<std::string>>();
        doc_id = document.value("doc_id", doc_id);
    }
    request.doc = make_document(doc_id, sentences);
    request.strategy.kind = strategy_kind_from(body.value("strategy", std::string("continuous-sw")));
    request.strategy.chunk_limit = body.value("chunk_limit", kInferenceChunkLimit);
    request.nmt_backend = body.at("backends").at("nmt").get<std::string>();
    request.llm_backend = body.at("backends").at("llm").get<std::string>();
    return request;
}

}  // namespace

struct ApiServer::Impl {
    SessionManager& sessions;
    TagLexicons lexicons;
    httplib::Server server;

    Impl(SessionManager& s, TagLexicons l) : sessions(s), lexicons(std::move(l)) { routes(); }

    template <typename Fn>
    httplib::Server::Handler guarded(Fn fn) {
        return [fn](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const Error& e) {
                send(res, http_status_for(e.code()), error_body(e));
            } catch (const json::exception& e) {
                send(res, 400, error_body(Error(ErrorCode::ParseError, std::string("malformed request: ") + e.what())));
            } catch (const std::exception& e) {
                send(res, 500, error_body(Error(ErrorCode::StorageError, e.what())));
            }
        };
    }

    void routes() {
        server.Post("/api/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
            auto created = sessions.create(create_request_from(parse_body(req)));
            send(res, 201, {{"session_id", created->session.session_id}, {"revision", created->session.revision}});
        }));

        server.Get("/api/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
            json out = json::array();
            for (const auto& s : sessions.list()) {
                out.push_back({{"session_id", s.session_id}, {"doc_id", s.doc_id}, {"revision", s.revision}, {"n", s.n}});
            }
            send(res, 200, out);
        }));

        server.Get(R"(/api/sessions/([A-Za-z0-9_-]+))",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       std::optional<std::uint64_t> since;
                       if (req.has_param("since")) {
                           const auto text = req.get_param_value("since");
                           std::uint64_t value = 0;
                           auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
                           if (ec != std::errc() || end != text.data() + text.size()) {
                               throw Error(ErrorCode::InvalidArgument, "since must be a revision number", text);
                           }
                           since = value;
                       }
                       send(res, 200, session_view(*sessions.get(req.matches[1]), since));
                   }));

        server.Post(R"(/api/sessions/([A-Za-z0-9_-]+)/edits)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const auto body = parse_body(req);
                        const auto index = body.at("index").get<std::size_t>();
                        const auto text = body.at("text").get<std::string>();
                        send(res, 202, {{"revision", sessions.edit(req.matches[1], index, text)}});
                    }));

        server.Post(R"(/api/sessions/([A-Za-z0-9_-]+)/metrics)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const auto body = parse_body(req);
                        const auto snapshot = sessions.get(req.matches[1]);
                        const auto& s = snapshot->session;
                        const auto references = body.at("references").get<std::vector<std::string>>();
                        if (references.size() != s.size()) {
                            throw Error(ErrorCode::LengthMismatch, "references must align with the session",
                                        std::to_string(references.size()) + " vs " + std::to_string(s.size()));
                        }
                        EvalInputs inputs{{make_document(s.doc.doc_id, s.output_texts())},
                                          {make_document(s.doc.doc_id, references)},
                                          {s.doc}};
                        auto report = evaluate(inputs, lexicons);
                        if (body.contains("comet") && !body.at("comet").is_null()) report.comet = body.at("comet").get<double>();
                        const auto effort = edit_effort(s.output_texts(), references);
                        json out = to_json(report);
                        out["edit_effort"] = {{"per_sentence", effort.per_sentence}, {"total", effort.total}};
                        out["revision"] = s.revision;
                        send(res, 200, out);
                    }));

        server.Delete(R"(/api/sessions/([A-Za-z0-9_-]+))",
                      guarded([this](const httplib::Request& req, httplib::Response& res) {
                          sessions.remove(req.matches[1]);
                          res.status = 204;
                      }));
    }
};

ApiServer::ApiServer(SessionManager& sessions, TagLexicons lexicons)
    : impl_(std::make_unique<Impl>(sessions, std::move(lexicons))) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen() { return impl_->server.listen_after_bind(); }

void ApiServer::stop() {
    if (impl_) impl_->server.stop();
}

void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace docape
