#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "p2k/dictionary.hpp"
#include "p2k/gallery_index.hpp"

namespace p2k {

/// Ground truth for one benchmark query.
struct BenchmarkQuery {
    std::string query_id;
    VisualDictionary reference;
    std::string edit;
    std::string target_id;
    std::vector<AttributeEntry> positive_constraints;
    std::vector<AttributeEntry> negative_constraints;

    friend bool operator==(const BenchmarkQuery&, const BenchmarkQuery&) = default;
};

/// query_id -> ranked candidate ids.
using Rankings = std::map<std::string, std::vector<std::string>>;

/// Contains every positive constraint and none of the negative ones.
bool satisfies_constraints(const VisualDictionary& dict, std::span<const AttributeEntry> positive,
                           std::span<const AttributeEntry> negative);

/// 1 - |A ∩ B| / |A ∪ B| over (key, value) sets; 0 when both are empty.
double jaccard_distance(const VisualDictionary& a, const VisualDictionary& b);

/// Fraction of queries whose target is among the first K ids. Throws MissingRanking.
double recall_at_k(const Rankings& rankings, std::span<const BenchmarkQuery> queries, std::size_t k);

/// Mean over queries of (#constraint-satisfying candidates in the top K) / K.
/// A ranking shorter than K is scored over its own length.
double attribute_consistency_at_k(const Rankings& rankings, std::span<const BenchmarkQuery> queries,
                                  const GalleryIndex& gallery, std::size_t k);

/// Mean over rankings of the mean pairwise Jaccard distance among the top K.
/// Lists with fewer than two candidates score 0.
double intra_list_diversity_at_k(const Rankings& rankings, const GalleryIndex& gallery, std::size_t k);

/// Per-list building blocks of the two metrics above.
double list_attribute_consistency(std::span<const std::string> ids, const BenchmarkQuery& query,
                                  const GalleryIndex& gallery, std::size_t k);
double list_diversity(std::span<const std::string> ids, const GalleryIndex& gallery, std::size_t k);

}  // namespace p2k
