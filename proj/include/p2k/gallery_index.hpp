#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "p2k/dictionary.hpp"
#include "p2k/embedding.hpp"

namespace p2k {

struct GalleryItem {
    std::string id;
    VisualDictionary dictionary;
    std::set<std::string> tags;

    friend bool operator==(const GalleryItem&, const GalleryItem&) = default;
};

struct SearchHit {
    std::string id;
    double similarity = 0.0;
};

/// Immutable gallery snapshot: items plus one row-aligned embedding each.
class GalleryIndex {
public:
    GalleryIndex() = default;

    std::size_t size() const noexcept { return items_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }
    std::uint64_t fingerprint() const noexcept { return fingerprint_; }

    std::span<const GalleryItem> items() const noexcept { return items_; }
    const GalleryItem& item(std::size_t row) const { return items_.at(row); }
    std::span<const float> row(std::size_t i) const {
        return std::span<const float>(vectors_).subspan(i * dimension_, dimension_);
    }
    std::span<const float> vectors() const noexcept { return vectors_; }

    std::optional<std::size_t> find(const std::string& id) const;
    /// Throws UnknownCandidateId.
    std::size_t row_of(const std::string& id) const;

    /// Throws FingerprintMismatch unless the index was built with `cfg`'s embedding function.
    void check_fingerprint(const EmbedderConfig& cfg) const;

private:
    friend GalleryIndex build_index(std::vector<GalleryItem>, const EmbedderConfig&);
    friend GalleryIndex load_index(const std::filesystem::path&);
    GalleryIndex(std::vector<GalleryItem> items, std::vector<float> vectors, std::size_t dimension,
                 std::uint64_t fingerprint);

    std::vector<GalleryItem> items_;
    std::vector<float> vectors_;
    std::size_t dimension_ = 0;
    std::uint64_t fingerprint_ = 0;
    std::unordered_map<std::string, std::size_t> rows_by_id_;
};

/// Throws DuplicateId, or propagates embedding errors.
GalleryIndex build_index(std::vector<GalleryItem> items, const EmbedderConfig& cfg);

/// Little-endian layout:
///   "P2K1" | version u32 | dimension u32 | count u32 | fingerprint u64
///   | count*dimension float32 | json length u64 | json (items) | crc32 u32
void save_index(const GalleryIndex& index, const std::filesystem::path& path);
/// Throws CorruptIndex on bad magic, version, size or checksum.
GalleryIndex load_index(const std::filesystem::path& path);

/// Exhaustive cosine search; descending similarity, ties by ascending id.
std::vector<SearchHit> top_k_by_cosine(const GalleryIndex& index, const EmbeddingVector& query, std::size_t k);

}  // namespace p2k
