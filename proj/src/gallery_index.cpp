#include "p2k/gallery_index.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <unordered_set>

#include <zlib.h>

#include "p2k/error.hpp"
#include "p2k/json_io.hpp"

namespace p2k {

namespace {

constexpr char kMagic[4] = {'P', '2', 'K', '1'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 4 + 8;

template <typename T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
    return v;
}

class ByteWriter {
public:
    template <typename T>
    void put(T v) {
        v = to_little(v);
        const auto* p = reinterpret_cast<const unsigned char*>(&v);
        buf_.insert(buf_.end(), p, p + sizeof(T));
    }
    void put_bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
    const std::vector<unsigned char>& bytes() const { return buf_; }

private:
    std::vector<unsigned char> buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const unsigned char> data) : data_(data) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return to_little(v);
    }
    std::string_view get_bytes(std::size_t n) {
        need(n);
        std::string_view s(reinterpret_cast<const char*>(data_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw Error(ErrorCode::CorruptIndex, "index file is truncated");
    }
    std::span<const unsigned char> data_;
    std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::span<const unsigned char> data) {
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks for large files.
    constexpr std::size_t kChunk = 1u << 30;
    for (std::size_t off = 0; off < data.size(); off += kChunk) {
        auto n = static_cast<uInt>(std::min(kChunk, data.size() - off));
        crc = crc32(crc, data.data() + off, n);
    }
    return static_cast<std::uint32_t>(crc);
}

bool hit_before(const SearchHit& a, const SearchHit& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.id < b.id;
}

}  // namespace

GalleryIndex::GalleryIndex(std::vector<GalleryItem> items, std::vector<float> vectors, std::size_t dimension,
                           std::uint64_t fingerprint)
    : items_(std::move(items)), vectors_(std::move(vectors)), dimension_(dimension), fingerprint_(fingerprint) {
    rows_by_id_.reserve(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) {
        if (items_[i].id.empty()) throw Error(ErrorCode::InvalidArgument, "gallery id must be non-empty");
        if (!rows_by_id_.emplace(items_[i].id, i).second) {
            throw Error(ErrorCode::DuplicateId, "duplicate gallery id '" + items_[i].id + "'");
        }
    }
}

std::optional<std::size_t> GalleryIndex::find(const std::string& id) const {
    auto it = rows_by_id_.find(id);
    if (it == rows_by_id_.end()) return std::nullopt;
    return it->second;
}

std::size_t GalleryIndex::row_of(const std::string& id) const {
    auto row = find(id);
    if (!row) throw Error(ErrorCode::UnknownCandidateId, "unknown candidate id '" + id + "'");
    return *row;
}

void GalleryIndex::check_fingerprint(const EmbedderConfig& cfg) const {
    if (cfg.fingerprint() != fingerprint_ || cfg.dimension != dimension_) {
        throw Error(ErrorCode::FingerprintMismatch,
                    "index was built with a different embedder (dimension " + std::to_string(dimension_) +
                        ") than the one configured (dimension " + std::to_string(cfg.dimension) + ")");
    }
}

GalleryIndex build_index(std::vector<GalleryItem> items, const EmbedderConfig& cfg) {
    cfg.validate();
    std::vector<std::string> texts;
    texts.reserve(items.size());
    for (const auto& item : items) texts.push_back(serialize(item.dictionary));
    std::unordered_set<std::string_view> seen;
    for (const auto& item : items) {
        if (!seen.insert(item.id).second) throw Error(ErrorCode::DuplicateId, "duplicate gallery id '" + item.id + "'");
    }

    auto embedded = embed_batch(texts, cfg);
    std::vector<float> vectors;
    vectors.reserve(items.size() * cfg.dimension);
    for (const auto& e : embedded) {
        if (e.dimension() != cfg.dimension) {
            throw Error(ErrorCode::DimensionMismatch, "embedder returned dimension " + std::to_string(e.dimension()));
        }
        vectors.insert(vectors.end(), e.components().begin(), e.components().end());
    }
    return GalleryIndex(std::move(items), std::move(vectors), cfg.dimension, cfg.fingerprint());
}

void save_index(const GalleryIndex& index, const std::filesystem::path& path) {
    ByteWriter w;
    w.put_bytes(std::string_view(kMagic, 4));
    w.put<std::uint32_t>(kFormatVersion);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(index.dimension()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(index.size()));
    w.put<std::uint64_t>(index.fingerprint());
    for (float f : index.vectors()) w.put<float>(f);

    json items = json::array();
    for (const auto& item : index.items()) items.push_back(to_json(item));
    std::string blob = items.dump();
    w.put<std::uint64_t>(blob.size());
    w.put_bytes(blob);
    w.put<std::uint32_t>(crc32_of(w.bytes()));

    // Write beside the target and rename, so readers never see a partial file.
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(w.bytes().data()), static_cast<std::streamsize>(w.bytes().size()));
        if (!out) throw Error(ErrorCode::Io, "failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

GalleryIndex load_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (data.size() < kHeaderBytes + 8 + 4) throw Error(ErrorCode::CorruptIndex, "index file is truncated");
    if (std::memcmp(data.data(), kMagic, 4) != 0) throw Error(ErrorCode::CorruptIndex, "bad magic, not a P2K1 index");

    auto body = std::span<const unsigned char>(data).first(data.size() - 4);
    ByteReader tail(std::span<const unsigned char>(data).last(4));
    if (tail.get<std::uint32_t>() != crc32_of(body)) throw Error(ErrorCode::CorruptIndex, "checksum mismatch");

    ByteReader r(body);
    r.get_bytes(4);
    auto version = r.get<std::uint32_t>();
    if (version != kFormatVersion) {
        throw Error(ErrorCode::CorruptIndex, "unsupported index version " + std::to_string(version));
    }
    std::size_t dimension = r.get<std::uint32_t>();
    std::size_t count = r.get<std::uint32_t>();
    auto fingerprint = r.get<std::uint64_t>();
    if (dimension == 0 || count > r.remaining() / (sizeof(float) * dimension)) {
        throw Error(ErrorCode::CorruptIndex, "vector block does not fit the file");
    }
    std::vector<float> vectors(count * dimension);
    for (auto& f : vectors) f = r.get<float>();

    auto blob_len = r.get<std::uint64_t>();
    if (blob_len != r.remaining()) throw Error(ErrorCode::CorruptIndex, "item block length mismatch");
    auto blob = r.get_bytes(static_cast<std::size_t>(blob_len));

    std::vector<GalleryItem> items;
    try {
        auto parsed = json::parse(blob);
        for (const auto& j : parsed) items.push_back(gallery_item_from_json(j));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptIndex, std::string("item block is not valid JSON: ") + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::CorruptIndex, std::string("item block: ") + e.what());
    }
    if (items.size() != count) throw Error(ErrorCode::CorruptIndex, "item count does not match vector count");
    try {
        return GalleryIndex(std::move(items), std::move(vectors), dimension, fingerprint);
    } catch (const Error& e) {
        throw Error(ErrorCode::CorruptIndex, e.what());
    }
}

std::vector<SearchHit> top_k_by_cosine(const GalleryIndex& index, const EmbeddingVector& query, std::size_t k) {
    if (query.dimension() != index.dimension()) {
        throw Error(ErrorCode::DimensionMismatch, "query dimension " + std::to_string(query.dimension()) +
                                                      " != index dimension " + std::to_string(index.dimension()));
    }
    std::vector<SearchHit> hits;
    hits.reserve(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        double sim = query.is_zero() ? 0.0 : cosine_similarity(query.components(), index.row(i));
        hits.push_back({index.item(i).id, sim});
    }
    k = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(), hit_before);
    hits.resize(k);
    return hits;
}

}  // namespace p2k
