#pragma once

#include <chrono>
#include <string>

namespace p2k {

/// "http://host:port/path" split into the pieces cpp-httplib wants.
struct HttpEndpoint {
    std::string base;  // scheme://host:port
    std::string path;  // begins with '/'
};

/// Throws InvalidArgument when the locator has no host.
HttpEndpoint parse_endpoint(const std::string& locator);

struct PostResult {
    int status = 0;
    std::string body;
};

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{100};
    std::chrono::seconds timeout{10};
};

/// POST with exponential backoff on transport failures and 5xx responses.
/// Throws RemoteUnavailable when every attempt fails.
PostResult post_with_retry(const HttpEndpoint& endpoint, const std::string& body,
                           const std::string& content_type, const RetryPolicy& policy = {});

}  // namespace p2k
