#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "p2k/dictionary.hpp"
#include "p2k/embedding.hpp"
#include "p2k/gallery_index.hpp"

namespace p2k {

/// alpha trades positive enforcement against negative suppression; beta weights open anchors.
struct IntentWeights {
    double alpha = 0.7;
    double beta = 0.3;

    void validate() const;
};

struct ScoredCandidate {
    std::string id;
    std::size_t row = 0;  // row in the gallery index
    double p = 0.0;       // similarity to the positive subset
    double o = 0.0;       // similarity to the open subset
    double n = 0.0;       // similarity to the negative subset
    double relevance = 0.0;
};

struct RerankParams {
    double lambda = 0.0;
    std::size_t pool_size = 200;
    std::size_t k = 10;

    void validate() const;
};

/// alpha*p + beta*o - (1-alpha)*n
inline double relevance_score(const IntentWeights& w, double p, double o, double n) {
    return w.alpha * p + w.beta * o - (1.0 - w.alpha) * n;
}

/// One vector per polarity subset. An empty subset embeds to the zero vector.
struct QueryVectors {
    EmbeddingVector positive;
    EmbeddingVector open;
    EmbeddingVector negative;
};

QueryVectors embed_query(const PolaritySplit& split, const EmbedderConfig& cfg);

/// Scores every gallery item and returns the top `pool_size` by relevance,
/// descending, ties by ascending id.
std::vector<ScoredCandidate> score_pool(const QueryVectors& query, const GalleryIndex& index, const IntentWeights& w,
                                        std::size_t pool_size);
std::vector<ScoredCandidate> score_pool(const QueryDictionary& query, const GalleryIndex& index,
                                        const IntentWeights& w, const EmbedderConfig& cfg, std::size_t pool_size);

/// Greedy diversity rerank over the pool. Relevance is min-max normalized over
/// the pool (all 0 when constant), distances are (1 - cos)/2 between gallery
/// embeddings, and the min over an empty selection counts as 1. Ties go to the
/// smaller id. Returns ids in pick order. Throws EmptyPool, KTooLarge.
std::vector<std::string> mmr_rerank(std::span<const ScoredCandidate> pool, const GalleryIndex& index,
                                    const RerankParams& params);

/// Min-max normalization used by mmr_rerank.
std::vector<double> normalize_relevance(std::span<const ScoredCandidate> pool);

}  // namespace p2k
