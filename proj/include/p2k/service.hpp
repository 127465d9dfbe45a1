#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "p2k/embedding.hpp"
#include "p2k/gallery_index.hpp"
#include "p2k/json_io.hpp"
#include "p2k/ranking.hpp"

namespace httplib {
class Server;
}

namespace p2k {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path index_path;
    EmbedderConfig embedder;
    bool dimension_from_index = true;  // unset in config: take the index's dimension
    IntentWeights weights;
    RerankParams rerank;
    std::optional<std::string> decompose_endpoint;
    std::chrono::seconds request_timeout{10};
    std::size_t max_concurrent = 64;

    void validate() const;
};

/// Flat JSON object: listen, index, embedder ("local_hashed" | "remote"),
/// dimension, embed_endpoint, batch_size, alpha, beta, lambda, k, pool,
/// decompose_endpoint, request_timeout_s, max_concurrent.
ServiceConfig service_config_from_json(const json& j);

/// P2K_INDEX, P2K_LISTEN and P2K_EMBED_ENDPOINT win over file values.
void apply_env_overrides(ServiceConfig& config);

/// "host:port" or ":port".
void parse_listen(const std::string& listen, std::string& host, int& port);

struct HttpReply {
    int status = 200;
    json body;
};

/// Stateless request handling over an immutable index snapshot.
class QueryService {
public:
    /// Loads the index and checks it against the embedder fingerprint.
    explicit QueryService(ServiceConfig config);
    QueryService(ServiceConfig config, std::shared_ptr<const GalleryIndex> index);
    ~QueryService();

    QueryService(const QueryService&) = delete;
    QueryService& operator=(const QueryService&) = delete;

    HttpReply health() const;
    HttpReply query(const std::string& body) const;
    HttpReply candidate(const std::string& id) const;
    HttpReply embed(const std::string& body) const;

    /// Build-then-swap: the new snapshot is loaded off to the side; requests
    /// see 503 only while the pointer is exchanged.
    void swap_index(std::shared_ptr<const GalleryIndex> next);
    void reload(const std::filesystem::path& path);

    std::shared_ptr<const GalleryIndex> snapshot() const;
    const ServiceConfig& config() const noexcept { return config_; }

    /// Binds routes and blocks serving. Returns false if the port cannot be bound.
    bool listen();
    /// Binds to an ephemeral port on `host` in a background thread; returns the port.
    int start_background();
    void stop();

private:
    void bind_routes(httplib::Server& server);

    ServiceConfig config_;
    mutable std::mutex mu_;
    std::shared_ptr<const GalleryIndex> index_;
    std::atomic<bool> swapping_{false};
    std::unique_ptr<httplib::Server> server_;
    std::thread server_thread_;
};

}  // namespace p2k
