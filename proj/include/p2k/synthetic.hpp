#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "p2k/gallery_index.hpp"
#include "p2k/metrics.hpp"

namespace p2k {

/// splitmix64. `uniform(n)` is next() % n.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t uniform(std::uint64_t n) noexcept { return next() % n; }

private:
    std::uint64_t state_;
};

/// key -> admissible values. Iterated in sorted order, so generation is
/// independent of how the schema was assembled.
using Schema = std::map<std::string, std::set<std::string>>;

/// Six garment keys with four values each.
Schema default_schema();

struct SyntheticBenchmark {
    std::vector<GalleryItem> items;
    std::vector<BenchmarkQuery> queries;
};

/// Deterministic in `seed`. Items are drawn first (one value per key, distinct
/// dictionaries, ids "item-000000"...), then queries: a random target, 1-2
/// mutated keys whose target values become positives and whose displaced
/// reference values become negatives. Throws SchemaTooSmall.
SyntheticBenchmark generate_synthetic(std::uint64_t seed, const Schema& schema, std::size_t n_items,
                                      std::size_t n_queries);

}  // namespace p2k
