#include "p2k/metrics.hpp"

#include <algorithm>

#include "p2k/error.hpp"

namespace p2k {

namespace {

const std::vector<std::string>& ranking_for(const Rankings& rankings, const std::string& query_id) {
    auto it = rankings.find(query_id);
    if (it == rankings.end()) throw Error(ErrorCode::MissingRanking, "no ranking for query '" + query_id + "'");
    return it->second;
}

}  // namespace

bool satisfies_constraints(const VisualDictionary& dict, std::span<const AttributeEntry> positive,
                           std::span<const AttributeEntry> negative) {
    return std::all_of(positive.begin(), positive.end(), [&](const auto& e) { return dict.contains(e); }) &&
           std::none_of(negative.begin(), negative.end(), [&](const auto& e) { return dict.contains(e); });
}

double jaccard_distance(const VisualDictionary& a, const VisualDictionary& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t shared = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++shared;
            ++ia;
            ++ib;
        }
    }
    std::size_t uni = a.size() + b.size() - shared;
    return 1.0 - static_cast<double>(shared) / static_cast<double>(uni);
}

double recall_at_k(const Rankings& rankings, std::span<const BenchmarkQuery> queries, std::size_t k) {
    if (queries.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& q : queries) {
        const auto& ids = ranking_for(rankings, q.query_id);
        auto end = ids.begin() + static_cast<std::ptrdiff_t>(std::min(k, ids.size()));
        if (std::find(ids.begin(), end, q.target_id) != end) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(queries.size());
}

double list_attribute_consistency(std::span<const std::string> ids, const BenchmarkQuery& query,
                                  const GalleryIndex& gallery, std::size_t k) {
    std::size_t depth = std::min(k, ids.size());
    if (depth == 0) return 0.0;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < depth; ++i) {
        const auto& dict = gallery.item(gallery.row_of(ids[i])).dictionary;
        if (satisfies_constraints(dict, query.positive_constraints, query.negative_constraints)) ++ok;
    }
    return static_cast<double>(ok) / static_cast<double>(depth);
}

double attribute_consistency_at_k(const Rankings& rankings, std::span<const BenchmarkQuery> queries,
                                  const GalleryIndex& gallery, std::size_t k) {
    if (queries.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& q : queries) sum += list_attribute_consistency(ranking_for(rankings, q.query_id), q, gallery, k);
    return sum / static_cast<double>(queries.size());
}

double list_diversity(std::span<const std::string> ids, const GalleryIndex& gallery, std::size_t k) {
    std::size_t depth = std::min(k, ids.size());
    if (depth < 2) return 0.0;
    std::vector<const VisualDictionary*> dicts;
    dicts.reserve(depth);
    for (std::size_t i = 0; i < depth; ++i) dicts.push_back(&gallery.item(gallery.row_of(ids[i])).dictionary);

    double sum = 0.0;
    for (std::size_t i = 0; i < depth; ++i) {
        for (std::size_t j = i + 1; j < depth; ++j) sum += jaccard_distance(*dicts[i], *dicts[j]);
    }
    double pairs = static_cast<double>(depth) * static_cast<double>(depth - 1) / 2.0;
    return sum / pairs;
}

double intra_list_diversity_at_k(const Rankings& rankings, const GalleryIndex& gallery, std::size_t k) {
    if (rankings.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [query_id, ids] : rankings) sum += list_diversity(ids, gallery, k);
    return sum / static_cast<double>(rankings.size());
}

}  // namespace p2k
