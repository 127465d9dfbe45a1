#include "p2k/http_endpoint.hpp"

#include <thread>

#include <httplib.h>

#include "p2k/error.hpp"

namespace p2k {

HttpEndpoint parse_endpoint(const std::string& locator) {
    std::string rest = locator;
    std::string scheme = "http";
    if (auto p = rest.find("://"); p != std::string::npos) {
        scheme = rest.substr(0, p);
        rest = rest.substr(p + 3);
    }
    std::string path = "/";
    if (auto slash = rest.find('/'); slash != std::string::npos) {
        path = rest.substr(slash);
        rest = rest.substr(0, slash);
    }
    if (rest.empty()) throw Error(ErrorCode::InvalidArgument, "endpoint '" + locator + "' has no host");
    return {scheme + "://" + rest, path};
}

PostResult post_with_retry(const HttpEndpoint& endpoint, const std::string& body,
                           const std::string& content_type, const RetryPolicy& policy) {
    auto backoff = policy.initial_backoff;
    std::string last_error;
    for (int attempt = 1; attempt <= policy.attempts; ++attempt) {
        httplib::Client client(endpoint.base);
        client.set_connection_timeout(policy.timeout);
        client.set_read_timeout(policy.timeout);
        client.set_write_timeout(policy.timeout);
        auto res = client.Post(endpoint.path, body, content_type);
        if (res && res->status < 500) return {res->status, res->body};
        last_error = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
        if (attempt < policy.attempts) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
    throw Error(ErrorCode::RemoteUnavailable,
                endpoint.base + endpoint.path + " unavailable after " + std::to_string(policy.attempts) +
                    " attempts: " + last_error);
}

}  // namespace p2k
