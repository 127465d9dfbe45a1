#include "p2k/embedding.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "p2k/error.hpp"
#include "p2k/http_endpoint.hpp"

namespace p2k {

namespace {

bool is_separator(char c) {
    return c == ':' || c == ';' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

EmbeddingVector embed_local(std::string_view text, std::size_t dimension) {
    std::vector<float> counts(dimension, 0.0f);
    for (const auto& token : hashed_tokens(text)) {
        counts[fnv1a64(token) % dimension] += 1.0f;
    }
    return EmbeddingVector::normalized(std::move(counts));
}

std::vector<EmbeddingVector> embed_remote_chunk(std::span<const std::string> texts, const EmbedderConfig& cfg,
                                                const HttpEndpoint& endpoint) {
    nlohmann::json request = nlohmann::json::array();
    for (const auto& t : texts) request.push_back(t);
    auto res = post_with_retry(endpoint, request.dump(), "application/json");
    if (res.status < 200 || res.status >= 300) {
        throw Error(ErrorCode::RemoteUnavailable, "embedding service returned HTTP " + std::to_string(res.status))
            .with_payload(res.body);
    }

    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(res.body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedRemoteResponse, std::string("embedding response is not JSON: ") + e.what())
            .with_payload(res.body);
    }
    if (!reply.is_array() || reply.size() != texts.size()) {
        throw Error(ErrorCode::MalformedRemoteResponse,
                    "embedding response must be an array of " + std::to_string(texts.size()) + " vectors")
            .with_payload(res.body);
    }

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& row : reply) {
        if (!row.is_array() || !std::all_of(row.begin(), row.end(), [](const auto& x) { return x.is_number(); })) {
            throw Error(ErrorCode::MalformedRemoteResponse, "embedding rows must be arrays of numbers")
                .with_payload(res.body);
        }
        if (row.size() != cfg.dimension) {
            throw Error(ErrorCode::DimensionMismatch, "remote vector has dimension " + std::to_string(row.size()) +
                                                          ", expected " + std::to_string(cfg.dimension));
        }
        out.push_back(EmbeddingVector::normalized(row.get<std::vector<float>>()));
    }
    return out;
}

}  // namespace

EmbeddingVector EmbeddingVector::zero(std::size_t dimension) {
    EmbeddingVector v;
    v.components_.assign(dimension, 0.0f);
    v.zero_ = true;
    return v;
}

EmbeddingVector EmbeddingVector::normalized(std::vector<float> raw) {
    EmbeddingVector v;
    double sq = 0.0;
    for (float x : raw) sq += static_cast<double>(x) * x;
    if (sq > 0.0) {
        double inv = 1.0 / std::sqrt(sq);
        for (float& x : raw) x = static_cast<float>(x * inv);
    } else {
        std::fill(raw.begin(), raw.end(), 0.0f);
    }
    v.components_ = std::move(raw);
    v.zero_ = !(sq > 0.0);
    return v;
}

void EmbedderConfig::validate() const {
    if (dimension == 0) throw Error(ErrorCode::InvalidArgument, "embedding dimension must be positive");
    if (batch_size == 0) throw Error(ErrorCode::InvalidArgument, "batch size must be positive");
    if (kind == EmbedderKind::LocalHashed && dimension < 8) {
        throw Error(ErrorCode::InvalidArgument, "local hashed embedder needs dimension >= 8");
    }
    if (kind == EmbedderKind::Remote && (!endpoint || endpoint->empty())) {
        throw Error(ErrorCode::InvalidArgument, "remote embedder requires an endpoint");
    }
}

std::uint64_t EmbedderConfig::fingerprint() const {
    std::string desc = kind == EmbedderKind::LocalHashed ? "local_hashed/fnv1a64" : "remote/" + endpoint.value_or("");
    desc += "|d=" + std::to_string(dimension);
    return fnv1a64(desc);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<std::string> hashed_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (is_separator(c)) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
            continue;
        }
        current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

EmbeddingVector embed(std::string_view text, const EmbedderConfig& cfg) {
    std::string owned(text);
    return embed_batch(std::span<const std::string>(&owned, 1), cfg).front();
}

std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts, const EmbedderConfig& cfg) {
    cfg.validate();
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    if (cfg.kind == EmbedderKind::LocalHashed) {
        for (const auto& t : texts) out.push_back(embed_local(t, cfg.dimension));
        return out;
    }

    auto endpoint = parse_endpoint(*cfg.endpoint);
    for (std::size_t offset = 0; offset < texts.size(); offset += cfg.batch_size) {
        auto chunk = texts.subspan(offset, std::min(cfg.batch_size, texts.size() - offset));
        try {
            auto vectors = embed_remote_chunk(chunk, cfg, endpoint);
            std::move(vectors.begin(), vectors.end(), std::back_inserter(out));
        } catch (const Error& e) {
            throw Error(e.code(), "batch at offset " + std::to_string(offset) + ": " + e.what())
                .with_payload(e.payload());
        }
    }
    return out;
}

double cosine_similarity(std::span<const float> x, std::span<const float> y) {
    if (x.size() != y.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "cannot compare vectors of dimension " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += static_cast<double>(x[i]) * static_cast<double>(y[i]);
    // An all-zero side gives a dot of exactly 0; -0.0 is folded to 0.
    if (dot == 0.0) return 0.0;
    return std::clamp(dot, -1.0, 1.0);
}

double cosine_similarity(const EmbeddingVector& x, const EmbeddingVector& y) {
    if (x.dimension() != y.dimension()) {
        throw Error(ErrorCode::DimensionMismatch, "cannot compare vectors of dimension " +
                                                      std::to_string(x.dimension()) + " and " +
                                                      std::to_string(y.dimension()));
    }
    if (x.is_zero() || y.is_zero()) return 0.0;
    return cosine_similarity(x.components(), y.components());
}

}  // namespace p2k
