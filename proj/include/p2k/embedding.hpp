#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace p2k {

/// Unit-norm float vector, or exactly all-zero (the embedding of empty text).
class EmbeddingVector {
public:
    EmbeddingVector() = default;

    static EmbeddingVector zero(std::size_t dimension);
    /// L2-normalizes `raw` (accumulating in double). All-zero input stays zero.
    static EmbeddingVector normalized(std::vector<float> raw);

    std::span<const float> components() const noexcept { return components_; }
    std::size_t dimension() const noexcept { return components_.size(); }
    bool is_zero() const noexcept { return zero_; }

    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

private:
    std::vector<float> components_;
    bool zero_ = true;
};

enum class EmbedderKind { LocalHashed, Remote };

struct EmbedderConfig {
    EmbedderKind kind = EmbedderKind::LocalHashed;
    std::size_t dimension = 256;
    std::optional<std::string> endpoint;
    std::size_t batch_size = 64;

    /// Throws InvalidArgument if the config breaks its invariants.
    void validate() const;

    /// Identifies the embedding function (kind, dimension, endpoint). Batch size
    /// does not change the vectors and is excluded.
    std::uint64_t fingerprint() const;
};

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Tokens for the local embedder: lowercased text split on ':', ';' and whitespace.
std::vector<std::string> hashed_tokens(std::string_view text);

EmbeddingVector embed(std::string_view text, const EmbedderConfig& cfg);

/// Element i equals embed(texts[i], cfg). Remote requests are chunked by
/// cfg.batch_size; errors carry the batch offset in the message.
std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts, const EmbedderConfig& cfg);

/// Dot product accumulated in double. 0 when either side is all-zero.
/// Throws DimensionMismatch.
double cosine_similarity(std::span<const float> x, std::span<const float> y);
double cosine_similarity(const EmbeddingVector& x, const EmbeddingVector& y);

/// 1 - cosine_similarity, in [0, 2].
inline double cosine_distance(const EmbeddingVector& x, const EmbeddingVector& y) {
    return 1.0 - cosine_similarity(x, y);
}

}  // namespace p2k
