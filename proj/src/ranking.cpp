#include "p2k/ranking.hpp"

#include <algorithm>
#include <cmath>

#include "p2k/error.hpp"

namespace p2k {

namespace {

bool scored_before(const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.relevance != b.relevance) return a.relevance > b.relevance;
    return a.id < b.id;
}

double similarity_or_zero(const EmbeddingVector& q, std::span<const float> row) {
    return q.is_zero() ? 0.0 : cosine_similarity(q.components(), row);
}

}  // namespace

void IntentWeights::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw Error(ErrorCode::InvalidArgument, "beta must be finite and non-negative");
    }
}

void RerankParams::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda must lie in [0, 1]");
    if (pool_size == 0) throw Error(ErrorCode::InvalidArgument, "pool size must be positive");
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
    if (k > pool_size) {
        throw Error(ErrorCode::InvalidArgument,
                    "k (" + std::to_string(k) + ") exceeds pool size (" + std::to_string(pool_size) + ")");
    }
}

QueryVectors embed_query(const PolaritySplit& split, const EmbedderConfig& cfg) {
    std::vector<std::string> texts{serialize(split.positive), serialize(split.open), serialize(split.negative)};
    auto v = embed_batch(texts, cfg);
    return {std::move(v[0]), std::move(v[1]), std::move(v[2])};
}

std::vector<ScoredCandidate> score_pool(const QueryVectors& query, const GalleryIndex& index, const IntentWeights& w,
                                        std::size_t pool_size) {
    w.validate();
    if (pool_size == 0) throw Error(ErrorCode::InvalidArgument, "pool size must be positive");
    for (const auto* q : {&query.positive, &query.open, &query.negative}) {
        if (q->dimension() != index.dimension()) {
            throw Error(ErrorCode::DimensionMismatch, "query dimension " + std::to_string(q->dimension()) +
                                                          " != index dimension " + std::to_string(index.dimension()));
        }
    }

    std::vector<ScoredCandidate> scored;
    scored.reserve(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        auto row = index.row(i);
        ScoredCandidate c;
        c.id = index.item(i).id;
        c.row = i;
        c.p = similarity_or_zero(query.positive, row);
        c.o = similarity_or_zero(query.open, row);
        c.n = similarity_or_zero(query.negative, row);
        c.relevance = relevance_score(w, c.p, c.o, c.n);
        scored.push_back(std::move(c));
    }
    auto keep = static_cast<std::ptrdiff_t>(std::min(pool_size, scored.size()));
    std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(), scored_before);
    scored.resize(static_cast<std::size_t>(keep));
    return scored;
}

std::vector<ScoredCandidate> score_pool(const QueryDictionary& query, const GalleryIndex& index,
                                        const IntentWeights& w, const EmbedderConfig& cfg, std::size_t pool_size) {
    index.check_fingerprint(cfg);
    return score_pool(embed_query(split_by_polarity(query), cfg), index, w, pool_size);
}

std::vector<double> normalize_relevance(std::span<const ScoredCandidate> pool) {
    std::vector<double> out(pool.size(), 0.0);
    if (pool.empty()) return out;
    auto [lo, hi] = std::minmax_element(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
        return a.relevance < b.relevance;
    });
    double min = lo->relevance;
    double range = hi->relevance - min;
    if (range > 0.0) {
        for (std::size_t i = 0; i < pool.size(); ++i) out[i] = (pool[i].relevance - min) / range;
    }
    return out;
}

std::vector<std::string> mmr_rerank(std::span<const ScoredCandidate> pool, const GalleryIndex& index,
                                    const RerankParams& params) {
    if (pool.empty()) throw Error(ErrorCode::EmptyPool, "cannot rerank an empty pool");
    if (!(params.lambda >= 0.0 && params.lambda <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "lambda must lie in [0, 1]");
    }
    if (params.k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
    if (params.k > pool.size()) {
        throw Error(ErrorCode::KTooLarge, "k (" + std::to_string(params.k) + ") exceeds pool of " +
                                              std::to_string(pool.size()));
    }

    std::vector<std::size_t> rows;
    rows.reserve(pool.size());
    for (const auto& c : pool) rows.push_back(index.row_of(c.id));

    const auto rel = normalize_relevance(pool);
    const double lambda = params.lambda;
    std::vector<double> min_dist(pool.size(), 1.0);
    std::vector<bool> taken(pool.size(), false);
    std::vector<std::string> picked;
    picked.reserve(params.k);

    while (picked.size() < params.k) {
        std::size_t best = pool.size();
        double best_score = 0.0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (taken[i]) continue;
            double score = (1.0 - lambda) * rel[i] + lambda * min_dist[i];
            if (best == pool.size() || score > best_score || (score == best_score && pool[i].id < pool[best].id)) {
                best = i;
                best_score = score;
            }
        }
        taken[best] = true;
        picked.push_back(pool[best].id);

        auto chosen = index.row(rows[best]);
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (taken[i]) continue;
            double d = (1.0 - cosine_similarity(index.row(rows[i]), chosen)) / 2.0;
            min_dist[i] = std::min(min_dist[i], d);
        }
    }
    return picked;
}

}  // namespace p2k
