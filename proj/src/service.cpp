#include "p2k/service.hpp"

#include <cstdlib>

#include <httplib.h>

#include "p2k/edit_parser.hpp"
#include "p2k/error.hpp"
#include "p2k/pipeline.hpp"

namespace p2k {

namespace {

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyField:
        case ErrorCode::ReservedCharacter:
        case ErrorCode::ContradictoryUpdates:
        case ErrorCode::InvalidArgument:
        case ErrorCode::UnparsableClause:
        case ErrorCode::KTooLarge:
        case ErrorCode::EmptyPool:
            return 400;
        case ErrorCode::UnknownCandidateId:
            return 404;
        case ErrorCode::RemoteUnavailable:
        case ErrorCode::MalformedRemoteResponse:
            return 502;
        default:
            return 500;
    }
}

HttpReply error_reply(int status, std::string_view code, const std::string& message) {
    return {status, {{"error", {{"code", code}, {"message", message}}}}};
}

HttpReply error_reply(const Error& e) {
    HttpReply reply = error_reply(status_for(e.code()), to_string(e.code()), e.what());
    if (e.span()) reply.body["error"]["span"] = {e.span()->begin, e.span()->end};
    return reply;
}

HttpReply unavailable() { return error_reply(503, "IndexSwapInProgress", "index swap in progress, retry"); }

double number_or(const json& j, const char* field, double fallback) {
    if (!j.contains(field)) return fallback;
    if (!j[field].is_number()) throw Error(ErrorCode::InvalidArgument, std::string("\"") + field + "\" must be a number");
    return j[field].get<double>();
}

std::size_t count_or(const json& j, const char* field, std::size_t fallback) {
    if (!j.contains(field)) return fallback;
    if (!j[field].is_number_integer() || j[field].get<long long>() <= 0) {
        throw Error(ErrorCode::InvalidArgument, std::string("\"") + field + "\" must be a positive integer");
    }
    return j[field].get<std::size_t>();
}

json signed_entries(std::span<const SignedEntry> entries) {
    json out = json::array();
    for (const auto& e : entries) out.push_back(to_json(e));
    return out;
}

}  // namespace

void ServiceConfig::validate() const {
    embedder.validate();
    weights.validate();
    rerank.validate();
    if (port < 0 || port > 65535) throw Error(ErrorCode::InvalidArgument, "port out of range");
    if (request_timeout.count() <= 0) throw Error(ErrorCode::InvalidArgument, "request timeout must be positive");
    if (max_concurrent == 0) throw Error(ErrorCode::InvalidArgument, "max concurrent requests must be positive");
}

void parse_listen(const std::string& listen, std::string& host, int& port) {
    auto colon = listen.rfind(':');
    if (colon == std::string::npos) throw Error(ErrorCode::InvalidArgument, "listen address must be host:port");
    if (colon > 0) host = listen.substr(0, colon);
    try {
        port = std::stoi(listen.substr(colon + 1));
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "bad port in listen address '" + listen + "'");
    }
}

ServiceConfig service_config_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "service config must be a JSON object");
    ServiceConfig c;
    try {
        if (j.contains("listen")) parse_listen(j["listen"].get<std::string>(), c.host, c.port);
        if (j.contains("index")) c.index_path = j["index"].get<std::string>();
        if (j.contains("embedder")) {
            auto kind = j["embedder"].get<std::string>();
            if (kind == "local_hashed") {
                c.embedder.kind = EmbedderKind::LocalHashed;
            } else if (kind == "remote") {
                c.embedder.kind = EmbedderKind::Remote;
            } else {
                throw Error(ErrorCode::InvalidArgument, "unknown embedder kind '" + kind + "'");
            }
        }
        if (j.contains("dimension")) {
            c.embedder.dimension = j["dimension"].get<std::size_t>();
            c.dimension_from_index = false;
        }
        if (j.contains("embed_endpoint")) c.embedder.endpoint = j["embed_endpoint"].get<std::string>();
        if (j.contains("batch_size")) c.embedder.batch_size = j["batch_size"].get<std::size_t>();
        c.weights.alpha = j.value("alpha", c.weights.alpha);
        c.weights.beta = j.value("beta", c.weights.beta);
        c.rerank.lambda = j.value("lambda", c.rerank.lambda);
        c.rerank.k = j.value("k", c.rerank.k);
        c.rerank.pool_size = j.value("pool", c.rerank.pool_size);
        if (j.contains("decompose_endpoint")) c.decompose_endpoint = j["decompose_endpoint"].get<std::string>();
        c.request_timeout = std::chrono::seconds(j.value("request_timeout_s", 10));
        c.max_concurrent = j.value("max_concurrent", c.max_concurrent);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("service config: ") + e.what());
    }
    return c;
}

void apply_env_overrides(ServiceConfig& config) {
    if (const char* v = std::getenv("P2K_INDEX"); v && *v) config.index_path = v;
    if (const char* v = std::getenv("P2K_LISTEN"); v && *v) parse_listen(v, config.host, config.port);
    if (const char* v = std::getenv("P2K_EMBED_ENDPOINT"); v && *v) {
        config.embedder.kind = EmbedderKind::Remote;
        config.embedder.endpoint = v;
    }
}

QueryService::QueryService(ServiceConfig config) : config_(std::move(config)) {
    if (config_.index_path.empty()) throw Error(ErrorCode::InvalidArgument, "service needs an index path");
    if (!std::filesystem::exists(config_.index_path)) {
        throw Error(ErrorCode::Io, "index " + config_.index_path.string() + " does not exist");
    }
    auto index = std::make_shared<const GalleryIndex>(load_index(config_.index_path));
    if (config_.dimension_from_index) config_.embedder.dimension = index->dimension();
    config_.validate();
    index->check_fingerprint(config_.embedder);
    index_ = std::move(index);
}

QueryService::QueryService(ServiceConfig config, std::shared_ptr<const GalleryIndex> index)
    : config_(std::move(config)) {
    if (!index) throw Error(ErrorCode::InvalidArgument, "service needs an index");
    if (config_.dimension_from_index) config_.embedder.dimension = index->dimension();
    config_.validate();
    index->check_fingerprint(config_.embedder);
    index_ = std::move(index);
}

QueryService::~QueryService() { stop(); }

std::shared_ptr<const GalleryIndex> QueryService::snapshot() const {
    std::lock_guard lock(mu_);
    return index_;
}

void QueryService::swap_index(std::shared_ptr<const GalleryIndex> next) {
    if (!next) throw Error(ErrorCode::InvalidArgument, "cannot swap in an empty index");
    next->check_fingerprint(config_.embedder);
    swapping_ = true;
    {
        std::lock_guard lock(mu_);
        index_ = std::move(next);
    }
    swapping_ = false;
}

void QueryService::reload(const std::filesystem::path& path) {
    swap_index(std::make_shared<const GalleryIndex>(load_index(path)));
}

HttpReply QueryService::health() const {
    if (swapping_) return unavailable();
    auto index = snapshot();
    return {200, {{"status", "ok"}, {"gallery_size", index->size()}, {"dimension", index->dimension()}}};
}

HttpReply QueryService::candidate(const std::string& id) const {
    if (swapping_) return unavailable();
    auto index = snapshot();
    auto row = index->find(id);
    if (!row) return error_reply(404, "UnknownCandidateId", "unknown candidate id '" + id + "'");
    return {200, to_json(index->item(*row))};
}

HttpReply QueryService::query(const std::string& body) const {
    if (swapping_) return unavailable();
    auto index = snapshot();
    try {
        json req;
        try {
            req = json::parse(body);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::InvalidArgument, std::string("request body is not JSON: ") + e.what());
        }
        if (!req.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");

        VisualDictionary reference;
        if (req.contains("reference_id")) {
            if (!req["reference_id"].is_string()) throw Error(ErrorCode::InvalidArgument, "\"reference_id\" must be a string");
            reference = index->item(index->row_of(req["reference_id"].get<std::string>())).dictionary;
        } else if (req.contains("reference")) {
            const auto& ref = req["reference"];
            reference = ref.is_string() ? deserialize(ref.get<std::string>()) : dictionary_from_json(ref);
        }

        std::string edit_text;
        if (req.contains("edit")) {
            if (!req["edit"].is_string()) throw Error(ErrorCode::InvalidArgument, "\"edit\" must be a string");
            edit_text = req["edit"].get<std::string>();
        }

        RetrievalOptions options;
        options.weights.alpha = number_or(req, "alpha", config_.weights.alpha);
        options.weights.beta = number_or(req, "beta", config_.weights.beta);
        options.rerank.lambda = number_or(req, "lambda", config_.rerank.lambda);
        options.rerank.k = count_or(req, "k", config_.rerank.k);
        options.rerank.pool_size = count_or(req, "pool", std::max(config_.rerank.pool_size, options.rerank.k));

        EditProgram edit = config_.decompose_endpoint ? decompose_remote(edit_text, *config_.decompose_endpoint)
                                                      : parse_edit(edit_text);
        auto result = retrieve(*index, config_.embedder, reference, std::move(edit), options);

        json results = json::array();
        for (const auto& r : result.results) {
            results.push_back(
                {{"id", r.id}, {"p", r.p}, {"o", r.o}, {"n", r.n}, {"relevance", r.relevance}, {"rank", r.rank}});
        }
        return {200,
                {{"results", std::move(results)},
                 {"parsed_edit", to_json(result.parsed_edit)},
                 {"merged_query", signed_entries(result.merged_query.entries())}}};
    } catch (const Error& e) {
        return error_reply(e);
    }
}

HttpReply QueryService::embed(const std::string& body) const {
    try {
        json req;
        try {
            req = json::parse(body);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::InvalidArgument, std::string("request body is not JSON: ") + e.what());
        }
        if (!req.is_array() || !std::all_of(req.begin(), req.end(), [](const json& x) { return x.is_string(); })) {
            throw Error(ErrorCode::InvalidArgument, "request body must be a JSON array of strings");
        }
        auto texts = req.get<std::vector<std::string>>();
        json out = json::array();
        for (const auto& v : embed_batch(texts, config_.embedder)) {
            out.push_back(std::vector<float>(v.components().begin(), v.components().end()));
        }
        return {200, std::move(out)};
    } catch (const Error& e) {
        return error_reply(e);
    }
}

void QueryService::bind_routes(httplib::Server& server) {
    auto send = [](httplib::Response& res, const HttpReply& reply) {
        res.status = reply.status;
        res.set_content(reply.body.dump(), "application/json");
    };
    auto guarded = [send](auto handler) {
        return [send, handler](const httplib::Request& req, httplib::Response& res) {
            try {
                send(res, handler(req));
            } catch (const std::exception& e) {
                send(res, error_reply(500, "Internal", e.what()));
            }
        };
    };

    server.Get("/health", guarded([this](const httplib::Request&) { return health(); }));
    server.Post("/query", guarded([this](const httplib::Request& req) { return query(req.body); }));
    server.Get(R"(/candidates/(.+))", guarded([this](const httplib::Request& req) {
                   return candidate(req.matches[1].str());
               }));
    server.Post("/embed", guarded([this](const httplib::Request& req) { return embed(req.body); }));

    const auto timeout = config_.request_timeout;
    server.set_read_timeout(timeout);
    server.set_write_timeout(timeout);
    const std::size_t workers = config_.max_concurrent;
    server.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
}

bool QueryService::listen() {
    server_ = std::make_unique<httplib::Server>();
    bind_routes(*server_);
    return server_->listen(config_.host, config_.port);
}

int QueryService::start_background() {
    server_ = std::make_unique<httplib::Server>();
    bind_routes(*server_);
    int port = server_->bind_to_any_port(config_.host);
    if (port < 0) throw Error(ErrorCode::Io, "cannot bind to " + config_.host);
    server_thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port;
}

void QueryService::stop() {
    if (server_) server_->stop();
    if (server_thread_.joinable()) server_thread_.join();
}

}  // namespace p2k
