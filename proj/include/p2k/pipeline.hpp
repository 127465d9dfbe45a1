#pragma once

#include <string>
#include <vector>

#include "p2k/dictionary.hpp"
#include "p2k/edit_parser.hpp"
#include "p2k/gallery_index.hpp"
#include "p2k/ranking.hpp"

namespace p2k {

/// Which polarity subsets reach the embedder. Disabled subsets are emptied and
/// so contribute a zero similarity. Positive constraints are always used.
struct PolarityToggles {
    bool use_neg = true;
    bool use_open = true;
};

struct RetrievalOptions {
    IntentWeights weights;
    RerankParams rerank;
    bool use_mmr = true;
    PolarityToggles toggles;
};

struct RankedResult {
    std::string id;
    double p = 0.0;
    double o = 0.0;
    double n = 0.0;
    double relevance = 0.0;
    std::size_t rank = 0;       // 1-based final position
    std::size_t pool_rank = 0;  // 1-based position before reranking
};

struct RetrievalResult {
    EditProgram parsed_edit;
    QueryDictionary merged_query;
    std::vector<ScoredCandidate> pool;
    std::vector<RankedResult> results;
};

/// merge -> split -> embed -> score pool -> optional MMR. k is clipped to the
/// pool when the gallery is smaller than k.
RetrievalResult retrieve(const GalleryIndex& index, const EmbedderConfig& cfg, const VisualDictionary& reference,
                         EditProgram edit, const RetrievalOptions& options);

}  // namespace p2k
